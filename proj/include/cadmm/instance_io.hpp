#pragma once

#include <stdexcept>
#include <string>
#include <variant>

#include "cadmm/apps.hpp"
#include "cadmm/model.hpp"

// JSON instance files.
//
//   {"kind": "qcqp" | "fpp" | "mb" | "pr", "n": ..., "field": "complex" | "real", ...}
//
// Matrices are {"rows": r, "cols": c, "data": [[re, im], ...]} in row-major order and vectors
// are [[re, im], ...]. qcqp and fpp files carry "objective": {"A", "b"} and "constraints":
// [{"A" | "a", "b"?, "c", "sense": "le" | "ge" | "eq" | "bounded", "eps"?}]; fpp adds
// "x_feas". mb files carry "H", "G", "tau", "eta"; pr files carry "A_s", "y",
// "noise": "none" | "bounded" | "gaussian", "eps", "snr_db" and optionally "s".

namespace cadmm {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Instance = std::variant<QcqpProblem, FppInstance, BeamformingInstance, PhaseRetrievalInstance>;

std::string instance_kind(const Instance& inst);

std::string to_json_string(const Instance& inst);
/// Throws InvalidInputError on malformed content.
Instance from_json_string(const std::string& text);

/// Throws IoError when the file cannot be written or read.
void write_instance(const std::string& path, const Instance& inst);
Instance read_instance(const std::string& path);

}  // namespace cadmm
