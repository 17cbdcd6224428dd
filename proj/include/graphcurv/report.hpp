#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graphcurv/geometry.hpp"
#include "graphcurv/identities.hpp"
#include "graphcurv/integrals.hpp"

namespace graphcurv {

/// Minimal JSON emitter with fixed key order and %.17g float formatting,
/// so identical inputs render byte-identically.
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(std::string_view k);
    JsonWriter& value(double v);
    JsonWriter& value(int v);
    JsonWriter& value(bool v);
    JsonWriter& value(std::string_view v);
    JsonWriter& value(const char* v) { return value(std::string_view(v)); }
    JsonWriter& value(std::span<const double> v);

    const std::string& str() const { return out_; }

private:
    void separator();
    std::string out_;
    std::vector<bool> first_;
    bool pending_key_ = false;
};

std::string format_double(double v);

std::string to_json(const ResidualReport& rep);
std::string to_json(std::span<const ResidualReport> reps);
std::string to_json(const EstimateReport& rep);
std::string to_json(const PointGeometry& pg);

/// Named-terms table: header row of term names, one row of values.
std::string to_csv(const EstimateReport& rep);
/// Sweep rows with the six per-radius columns in fixed order.
std::string sweep_to_csv(const EstimateReport& rep);

}  // namespace graphcurv
