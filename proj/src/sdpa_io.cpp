#include "ratopt/sdpa_io.hpp"

#include <fstream>
#include <sstream>

namespace ratopt {

SdpaData to_sdpa(const SdpProblem& problem) {
    SdpaData d;
    d.nvars = problem.nvars;
    d.c.resize(problem.nvars);
    for (int i = 0; i < problem.nvars; ++i) d.c[i] = problem.c(i);

    for (const auto& blk : problem.blocks) d.block_sizes.push_back(blk.side);
    const int m = static_cast<int>(problem.eq_rows.size());
    const int diag_block = static_cast<int>(problem.blocks.size()) + 1;
    if (m > 0) d.block_sizes.push_back(-2 * m);

    for (int k = 0; k < static_cast<int>(problem.blocks.size()); ++k) {
        const auto& blk = problem.blocks[k];
        for (const auto& [i, j, v] : blk.constant)
            if (v != 0) d.entries.emplace_back(0, k + 1, i + 1, j + 1, -v);
        for (const auto& [var, ents] : blk.coeff)
            for (const auto& [i, j, v] : ents)
                if (v != 0) d.entries.emplace_back(var + 1, k + 1, i + 1, j + 1, v);
    }
    for (int r = 0; r < m; ++r) {
        const double b = problem.eq_rhs[r];
        if (b != 0) {
            d.entries.emplace_back(0, diag_block, 2 * r + 1, 2 * r + 1, b);
            d.entries.emplace_back(0, diag_block, 2 * r + 2, 2 * r + 2, -b);
        }
        for (const auto& [var, v] : problem.eq_rows[r]) {
            if (v == 0) continue;
            d.entries.emplace_back(var + 1, diag_block, 2 * r + 1, 2 * r + 1, v);
            d.entries.emplace_back(var + 1, diag_block, 2 * r + 2, 2 * r + 2, -v);
        }
    }
    return d;
}

void write_sdpa(const SdpProblem& problem, std::ostream& out) {
    SdpaData d = to_sdpa(problem);
    out << d.nvars << "\n";
    out << d.block_sizes.size() << "\n";
    for (size_t i = 0; i < d.block_sizes.size(); ++i)
        out << d.block_sizes[i] << (i + 1 < d.block_sizes.size() ? " " : "\n");
    out.precision(17);
    for (size_t i = 0; i < d.c.size(); ++i) out << d.c[i] << (i + 1 < d.c.size() ? " " : "");
    out << "\n";
    for (const auto& [mat, blk, i, j, v] : d.entries)
        out << mat << " " << blk << " " << i << " " << j << " " << v << "\n";
}

void write_sdpa_file(const SdpProblem& problem, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    write_sdpa(problem, out);
}

SdpaData parse_sdpa(std::istream& in) {
    SdpaData d;
    std::string line;
    std::vector<std::string> payload;
    while (std::getline(in, line)) {
        if (!line.empty() && (line[0] == '*' || line[0] == '"')) continue;
        // braces and commas are legal separators in the header lines
        for (auto& ch : line)
            if (ch == ',' || ch == '(' || ch == ')' || ch == '{' || ch == '}') ch = ' ';
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        payload.push_back(line);
    }
    if (payload.size() < 4) throw std::runtime_error("truncated SDPA input");

    size_t pos = 0;
    auto next = [&]() -> std::istringstream { return std::istringstream(payload[pos++]); };

    int nblocks = 0;
    next() >> d.nvars;
    next() >> nblocks;
    if (d.nvars < 0 || nblocks < 0) throw std::runtime_error("bad SDPA header");
    {
        auto s = next();
        int v;
        while (s >> v) d.block_sizes.push_back(v);
        if (static_cast<int>(d.block_sizes.size()) != nblocks)
            throw std::runtime_error("block size list does not match the block count");
    }
    {
        auto s = next();
        double v;
        while (s >> v) d.c.push_back(v);
        if (static_cast<int>(d.c.size()) != d.nvars)
            throw std::runtime_error("objective length does not match the variable count");
    }
    while (pos < payload.size()) {
        auto s = next();
        int mat, blk, i, j;
        double v;
        if (!(s >> mat >> blk >> i >> j >> v)) throw std::runtime_error("bad entry line");
        if (mat < 0 || mat > d.nvars || blk < 1 || blk > nblocks || i < 1 || j < 1)
            throw std::runtime_error("entry indices out of range");
        const int side = std::abs(d.block_sizes[blk - 1]);
        if (i > side || j > side) throw std::runtime_error("entry indices out of range");
        d.entries.emplace_back(mat, blk, i, j, v);
    }
    return d;
}

}  // namespace ratopt
