#pragma once

#include <iosfwd>

#include "ratopt/sdp.hpp"

namespace ratopt {

// Flat image of a sparse SDPA problem (.dat-s). Entries are
// (matrix, block, i, j, value) with 1-based indices, matrix 0 meaning F_0.
struct SdpaData {
    int nvars = 0;
    std::vector<int> block_sizes;  // negative size marks a diagonal block
    std::vector<double> c;
    std::vector<std::tuple<int, int, int, int, double>> entries;
};

// Encoding: min c^T x with C + sum x_i A_i psd becomes the SDPA primal
// with F_0 = -C, F_i = A_i. Each equality row e^T x = b is written as a
// pair of diagonal entries (e^T x - b >= 0 and its negation) in one
// trailing diagonal block.
SdpaData to_sdpa(const SdpProblem& problem);

void write_sdpa(const SdpProblem& problem, std::ostream& out);
void write_sdpa_file(const SdpProblem& problem, const std::string& path);

SdpaData parse_sdpa(std::istream& in);

}  // namespace ratopt
