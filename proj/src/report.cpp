#include "graphcurv/report.hpp"

#include <cmath>
#include <cstdio>

namespace graphcurv {

std::string format_double(double v) {
    if (std::isnan(v)) return "null";
    if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void JsonWriter::separator() {
    if (pending_key_) {
        pending_key_ = false;
        return;
    }
    if (!first_.empty()) {
        if (!first_.back()) out_ += ",";
        first_.back() = false;
    }
}

JsonWriter& JsonWriter::begin_object() {
    separator();
    out_ += "{";
    first_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += "}";
    first_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    separator();
    out_ += "[";
    first_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += "]";
    first_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::key(std::string_view k) {
    separator();
    out_ += "\"";
    out_ += k;
    out_ += "\":";
    pending_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    separator();
    out_ += format_double(v);
    return *this;
}

JsonWriter& JsonWriter::value(int v) {
    separator();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(bool v) {
    separator();
    out_ += v ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::value(std::string_view v) {
    separator();
    out_ += "\"";
    for (char c : v) {
        switch (c) {
            case '"': out_ += "\\\""; break;
            case '\\': out_ += "\\\\"; break;
            case '\n': out_ += "\\n"; break;
            case '\t': out_ += "\\t"; break;
            default: out_ += c;
        }
    }
    out_ += "\"";
    return *this;
}

JsonWriter& JsonWriter::value(std::span<const double> v) {
    begin_array();
    for (double x : v) value(x);
    end_array();
    return *this;
}

namespace {

void write_residual(JsonWriter& w, const ResidualReport& rep) {
    w.begin_object();
    w.key("check").value(rep.name);
    w.key("x").value(std::span<const double>(rep.x));
    w.key("left").value(rep.left);
    w.key("right").value(rep.right);
    w.key("abs_residual").value(rep.abs_residual);
    w.key("rel_residual").value(rep.rel_residual);
    w.key("tolerance").value(rep.tolerance);
    if (rep.margin) w.key("margin").value(*rep.margin);
    w.key("pass").value(rep.pass);
    if (rep.skipped) w.key("skipped").value(true);
    if (!rep.note.empty()) w.key("note").value(rep.note);
    w.end_object();
}

void write_matrix(JsonWriter& w, std::span<const double> data, int rows,
                  int cols) {
    w.begin_array();
    for (int i = 0; i < rows; ++i)
        w.value(data.subspan(static_cast<std::size_t>(i) * cols, cols));
    w.end_array();
}

void write_sweep_row(JsonWriter& w, const SweepRow& r) {
    w.begin_object();
    w.key("R").value(r.radius);
    w.key("sup_normA2_R2").value(r.sup_normA2_R2);
    w.key("area_ratio").value(r.area_ratio);
    w.key("R_sup_H").value(r.r_sup_H);
    w.key("R2_sup_gradH_K1").value(r.r2_sup_gradH_K1);
    w.key("R3_sup_K2").value(r.r3_sup_K2);
    w.key("area_lower").value(r.area_lower);
    w.key("area_upper").value(r.area_upper);
    w.key("sup_normA2_R2_polished").value(r.sup_normA2_R2_polished);
    w.key("hypothesis_ok").value(r.hypothesis_ok);
    w.end_object();
}

}  // namespace

std::string to_json(const ResidualReport& rep) {
    JsonWriter w;
    write_residual(w, rep);
    return w.str();
}

std::string to_json(std::span<const ResidualReport> reps) {
    JsonWriter w;
    w.begin_array();
    for (const auto& r : reps) write_residual(w, r);
    w.end_array();
    return w.str();
}

std::string to_json(const EstimateReport& rep) {
    JsonWriter w;
    w.begin_object();
    w.key("name").value(rep.name);
    w.key("terms").begin_object();
    for (const auto& [k, v] : rep.terms) w.key(k).value(v);
    w.end_object();
    w.key("left").value(rep.left);
    w.key("right").value(rep.right);
    w.key("ratio").value(rep.ratio);
    if (rep.has_pass) w.key("pass").value(rep.pass);
    w.key("refinement_drift").value(rep.refinement_drift);
    w.key("converged").value(rep.converged);
    if (!rep.rows.empty()) {
        w.key("rows").begin_array();
        for (const auto& r : rep.rows) write_sweep_row(w, r);
        w.end_array();
    }
    if (!rep.note.empty()) w.key("note").value(rep.note);
    w.end_object();
    return w.str();
}

std::string to_json(const PointGeometry& pg) {
    const int n = pg.n, k = pg.k, m = pg.m;
    JsonWriter w;
    w.begin_object();
    w.key("n").value(n);
    w.key("k").value(k);
    w.key("depth").value(pg.depth);
    w.key("x").value(std::span<const double>(pg.x));
    w.key("f").value(std::span<const double>(pg.f));
    w.key("tangent");
    write_matrix(w, pg.tangent, n, m);
    w.key("metric");
    write_matrix(w, pg.metric, n, n);
    w.key("metric_inv");
    write_matrix(w, pg.metric_inv, n, n);
    w.key("sqrt_g").value(pg.sqrt_g);
    w.key("christoffel");
    write_matrix(w, pg.christoffel, n * n, n);
    w.key("normal");
    write_matrix(w, pg.normal, k, m);
    w.key("omega");
    write_matrix(w, pg.omega, n * k, k);
    w.key("h");
    write_matrix(w, pg.h, k * n, n);
    w.key("H").value(std::span<const double>(pg.H));
    w.key("normA2").value(pg.normA2);
    w.key("normH2").value(pg.normH2());
    w.key("riemann");
    write_matrix(w, pg.riemann, n * n * n, n);
    w.key("rperp");
    write_matrix(w, pg.rperp, n * n * k, k);
    w.key("normRperp2").value(pg.normRperp2);
    w.key("w").value(pg.w);
    w.key("omega_n1");
    write_matrix(w, pg.omega_n1, k, n);
    if (pg.gradA) {
        w.key("gradA");
        write_matrix(w, *pg.gradA, n * k * n, n);
        w.key("gradH");
        write_matrix(w, *pg.gradH, n, k);
        w.key("grad_normA2").value(std::span<const double>(*pg.grad_normA2));
        w.key("K1").value(*pg.K1);
    }
    if (pg.hessH) {
        w.key("hessH");
        write_matrix(w, *pg.hessH, n * n, k);
        w.key("hess_normA2");
        write_matrix(w, *pg.hess_normA2, n, n);
        w.key("K2").value(*pg.K2);
    }
    w.end_object();
    return w.str();
}

std::string to_csv(const EstimateReport& rep) {
    std::string header, row;
    for (const auto& [k, v] : rep.terms) {
        if (!header.empty()) {
            header += ",";
            row += ",";
        }
        header += k;
        row += format_double(v);
    }
    header += ",left,right,ratio,refinement_drift,converged";
    row += "," + format_double(rep.left) + "," + format_double(rep.right) +
           "," + format_double(rep.ratio) + "," +
           format_double(rep.refinement_drift) + "," +
           (rep.converged ? "1" : "0");
    return header + "\n" + row + "\n";
}

std::string sweep_to_csv(const EstimateReport& rep) {
    std::string out =
        "R,sup_normA2_R2,area_ratio,R_sup_H,R2_sup_gradH_K1,R3_sup_K2\n";
    for (const auto& r : rep.rows) {
        out += format_double(r.radius) + "," +
               format_double(r.sup_normA2_R2) + "," +
               format_double(r.area_ratio) + "," + format_double(r.r_sup_H) +
               "," + format_double(r.r2_sup_gradH_K1) + "," +
               format_double(r.r3_sup_K2) + "\n";
    }
    return out;
}

}  // namespace graphcurv
