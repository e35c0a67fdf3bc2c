#include "ratopt/moment.hpp"

#include <algorithm>
#include <set>

namespace ratopt {
namespace {

void enumerate_monomials(int nvars, int degree, int var, Exponents& cur,
                         std::vector<Exponents>& out) {
    if (var == nvars) {
        out.push_back(cur);
        return;
    }
    for (int e = 0; e <= degree; ++e) {
        cur[var] = e;
        enumerate_monomials(nvars, degree - e, var + 1, cur, out);
    }
    cur[var] = 0;
}

int half_degree_up(int deg) { return (deg + 1) / 2; }

}  // namespace

int MonomialBasis::index_of(const Exponents& e) const {
    auto it = index.find(e);
    if (it == index.end()) throw std::out_of_range("monomial not in basis");
    return it->second;
}

MonomialBasis monomial_basis(int nvars, int degree) {
    if (nvars < 1 || degree < 0) throw std::invalid_argument("bad basis parameters");
    MonomialBasis b;
    b.nvars = nvars;
    b.max_degree = degree;
    Exponents cur(nvars, 0);
    enumerate_monomials(nvars, degree, 0, cur, b.monomials);
    std::sort(b.monomials.begin(), b.monomials.end(), GradedLexLess{});
    for (int i = 0; i < b.size(); ++i) b.index[b.monomials[i]] = i;
    return b;
}

LocalizingBlock localizing_coefficients(const Polynomial& psi, int order,
                                        const std::string& label) {
    if (psi.is_zero()) throw std::invalid_argument("localizing a zero polynomial");
    LocalizingBlock blk;
    blk.label = label;
    blk.d = order - half_degree_up(psi.degree());
    if (blk.d < 0) throw std::invalid_argument("empty truncation: order too small for this block");
    blk.basis = monomial_basis(psi.nvars(), blk.d);
    blk.side = blk.basis.size();
    Exponents alpha(psi.nvars());
    for (int i = 0; i < blk.side; ++i) {
        for (int j = i; j < blk.side; ++j) {
            for (const auto& [kappa, c] : psi.terms()) {
                for (int v = 0; v < psi.nvars(); ++v)
                    alpha[v] = kappa[v] + blk.basis.monomials[i][v] + blk.basis.monomials[j][v];
                blk.coeff[alpha].emplace_back(i, j, c);
            }
        }
    }
    return blk;
}

int minimum_order(const JacobianAugmentedProgram& jap) {
    int n0 = half_degree_up(std::max(jap.objective.degree(), 0));
    for (const auto& e : jap.all_equalities)
        n0 = std::max(n0, half_degree_up(std::max(e.degree(), 0)));
    for (const auto& g : jap.inequalities)
        n0 = std::max(n0, half_degree_up(std::max(g.degree(), 0)));
    return std::max(n0, 1);
}

MomentRelaxation assemble_relaxation(const JacobianAugmentedProgram& jap, int order) {
    const int n0 = minimum_order(jap);
    if (order < n0)
        throw std::invalid_argument("relaxation order " + std::to_string(order) +
                                    " below the minimum " + std::to_string(n0));
    MomentRelaxation rel;
    rel.nvars = jap.nvars;
    rel.order = order;

    // gather with full alpha keys first, compact afterwards
    std::set<Exponents, GradedLexLess> used;
    const Exponents one(jap.nvars, 0);
    used.insert(one);

    std::vector<std::pair<Exponents, Rational>> obj_terms;
    for (const auto& [e, c] : jap.objective.terms()) {
        obj_terms.emplace_back(e, c);
        used.insert(e);
    }

    struct RawRow {
        int source;
        Exponents delta;
        std::map<Exponents, Rational, GradedLexLess> coeff;
    };
    std::vector<RawRow> raw_rows;
    for (int s = 0; s < static_cast<int>(jap.all_equalities.size()); ++s) {
        const Polynomial& e = jap.all_equalities[s];
        if (e.is_zero()) continue;
        const int d = order - half_degree_up(e.degree());
        MonomialBasis deltas = monomial_basis(jap.nvars, 2 * d);
        for (const auto& delta : deltas.monomials) {
            RawRow row;
            row.source = s;
            row.delta = delta;
            Exponents key(jap.nvars);
            for (const auto& [kappa, c] : e.terms()) {
                for (int v = 0; v < jap.nvars; ++v) key[v] = kappa[v] + delta[v];
                row.coeff[key] += c;
                used.insert(key);
            }
            raw_rows.push_back(std::move(row));
        }
    }

    std::vector<LocalizingBlock> raw_blocks;
    std::vector<int> raw_block_nu;
    for (int b = 0; b < static_cast<int>(jap.nu_products.size()); ++b) {
        const auto& np = jap.nu_products[b];
        if (order - half_degree_up(np.product.degree()) < 0) continue;  // omitted truncation
        std::string label = np.nu.empty() ? "M" : "g";
        for (int j : np.nu) label += "_" + std::to_string(j + 1);
        raw_blocks.push_back(localizing_coefficients(np.product, order, label));
        raw_block_nu.push_back(b);
        for (const auto& [alpha, entries] : raw_blocks.back().coeff) used.insert(alpha);
    }

    rel.moment_keys.assign(used.begin(), used.end());
    for (int i = 0; i < static_cast<int>(rel.moment_keys.size()); ++i)
        rel.key_index[rel.moment_keys[i]] = i;
    rel.y0_index = rel.key_index.at(one);

    for (const auto& [e, c] : obj_terms) rel.objective.emplace_back(rel.key_index.at(e), c);
    std::sort(rel.objective.begin(), rel.objective.end());

    std::set<std::vector<std::pair<int, Rational>>> seen_rows;
    for (auto& raw : raw_rows) {
        MomentRelaxation::Row row;
        row.source = raw.source;
        row.delta = raw.delta;
        for (const auto& [key, c] : raw.coeff)
            if (c != 0) row.coeff.emplace_back(rel.key_index.at(key), c);
        if (row.coeff.empty()) continue;
        if (!seen_rows.insert(row.coeff).second) continue;  // duplicate row
        rel.equality_rows.push_back(std::move(row));
    }

    for (int b = 0; b < static_cast<int>(raw_blocks.size()); ++b) {
        auto& raw = raw_blocks[b];
        MomentRelaxation::Block blk;
        blk.label = raw.label;
        blk.nu_index = raw_block_nu[b];
        blk.d = raw.d;
        blk.side = raw.side;
        blk.basis = raw.basis;
        for (auto& [alpha, entries] : raw.coeff) {
            auto& dst = blk.entries[rel.key_index.at(alpha)];
            // merge duplicate (i, j) contributions
            std::map<std::pair<int, int>, Rational> acc;
            for (auto& [i, j, c] : entries) acc[{i, j}] += c;
            for (auto& [ij, c] : acc)
                if (c != 0) dst.emplace_back(ij.first, ij.second, c);
            if (dst.empty()) blk.entries.erase(rel.key_index.at(alpha));
        }
        rel.blocks.push_back(std::move(blk));
    }
    return rel;
}

}  // namespace ratopt
