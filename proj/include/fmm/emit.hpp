#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "fmm/model.hpp"
#include "fmm/verify.hpp"

namespace fmm {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One solution per document. Factor matrices are stored row-major; the
// semantic row/column indices are 1-based as in the readable rendering.
struct SolutionDocument {
    int schema_version = 1;
    FactorMatrices factors;
    Field field = Field::ternary();
    nlohmann::ordered_json provenance = nlohmann::ordered_json::object();
    bool verified = false;

    bool operator==(const SolutionDocument&) const = default;
};

// Stable key order, two-space indentation, byte-deterministic for a fixed
// document. The only timestamp lives inside provenance.
std::string to_json(const SolutionDocument& doc);

struct LoadResult {
    SolutionDocument doc;
    bool verified_on_load = false;
    std::vector<Violation> violations;  // filled when re-verification failed
};

// Parses and re-verifies; a verification failure is flagged, not fatal.
// Malformed input throws ParseError with a location.
LoadResult from_json(const std::string& bytes);

// Renders "m_r = (...)(...)" lines from the U/V columns followed by
// "c_k = ..." lines from the W rows. Zero factors render as "m_r = 0".
std::string to_readable(const SolutionDocument& doc);

}  // namespace fmm
