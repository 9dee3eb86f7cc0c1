#ifndef EMBJET_MULTI_INDEX_HPP
#define EMBJET_MULTI_INDEX_HPP

#include <numeric>
#include <vector>

namespace embjet {

// Exponent vector of a monomial; ordered graded-lex so jet terms iterate
// by total degree.
struct MultiIndex {
    std::vector<int> e;

    MultiIndex() = default;
    explicit MultiIndex(int nvars) : e(nvars, 0) {}
    explicit MultiIndex(std::vector<int> exps) : e(std::move(exps)) {}

    int nvars() const { return static_cast<int>(e.size()); }
    int total_degree() const { return std::accumulate(e.begin(), e.end(), 0); }
    int operator[](int i) const { return e[i]; }
    int& operator[](int i) { return e[i]; }

    bool operator==(const MultiIndex& o) const { return e == o.e; }

    bool operator<(const MultiIndex& o) const {
        int da = total_degree(), db = o.total_degree();
        if (da != db) return da < db;
        return e < o.e;   // lex within a degree
    }

    MultiIndex operator+(const MultiIndex& o) const {
        MultiIndex r(*this);
        for (size_t i = 0; i < e.size(); ++i) r.e[i] += o.e[i];
        return r;
    }
};

// All monomials of total degree <= max_degree in nvars variables,
// in graded-lex order.
std::vector<MultiIndex> monomials_up_to(int nvars, int max_degree);

} // namespace embjet

#endif
