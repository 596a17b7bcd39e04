#pragma once

/** @file
 * Dictionaries of observables evaluated on trajectory states.
 */

#include <birkhoff/errors.hpp>
#include <birkhoff/systems.hpp>

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace birkhoff {

class Dictionary {
public:
    enum class Kind { FourierTorus, Monomials, StateIdentity };
    using Row = Eigen::RowVectorXcd;

    /**
     * Fourier modes exp(i sum_j k_j s_j x_j) with |k_j| <= kmax[j]. Modes are
     * ordered lexicographically in (k_1, k_2, ...), each index running from
     * -kmax to kmax. `scaling` defaults to 1 for every coordinate.
     */
    static Dictionary fourier(std::vector<int> kmax, std::vector<double> scaling = {})
    {
        if (kmax.empty())
            throw ConfigError("fourier dictionary: need at least one coordinate");
        for (int k : kmax)
            if (k < 0)
                throw ConfigError("fourier dictionary: kmax must be >= 0");
        if (scaling.empty())
            scaling.assign(kmax.size(), 1.0);
        if (scaling.size() != kmax.size())
            throw ConfigError("fourier dictionary: scaling length must match kmax");
        Dictionary d(Kind::FourierTorus, static_cast<Eigen::Index>(kmax.size()));
        d.kmax_ = std::move(kmax);
        d.scaling_ = std::move(scaling);
        std::vector<int> idx(d.kmax_.size());
        for (std::size_t j = 0; j < idx.size(); ++j)
            idx[j] = -d.kmax_[j];
        while (true) {
            d.exponents_.push_back(idx);
            std::size_t j = idx.size();
            while (j > 0) {
                --j;
                if (idx[j] < d.kmax_[j]) {
                    ++idx[j];
                    break;
                }
                idx[j] = -d.kmax_[j];
                if (j == 0) {
                    d.size_ = static_cast<Eigen::Index>(d.exponents_.size());
                    return d;
                }
            }
        }
    }

    /// All monomials of total degree <= max_degree, graded then lexicographic:
    /// for one variable 1, x, ..., x^max_degree.
    static Dictionary monomials(int max_degree, Eigen::Index dimension = 1)
    {
        if (max_degree < 0 || dimension < 1)
            throw ConfigError("monomial dictionary: need degree >= 0 and dimension >= 1");
        Dictionary d(Kind::Monomials, dimension);
        d.degree_ = max_degree;
        for (int total = 0; total <= max_degree; ++total) {
            std::vector<int> e(static_cast<std::size_t>(dimension), 0);
            enumerate_degree(d.exponents_, e, 0, total);
        }
        d.size_ = static_cast<Eigen::Index>(d.exponents_.size());
        return d;
    }

    static Dictionary state_identity(Eigen::Index dimension)
    {
        if (dimension < 1)
            throw ConfigError("identity dictionary: dimension must be >= 1");
        Dictionary d(Kind::StateIdentity, dimension);
        d.size_ = dimension;
        return d;
    }

    Kind kind() const noexcept { return kind_; }
    Eigen::Index size() const noexcept { return size_; }
    Eigen::Index dimension() const noexcept { return dim_; }
    /// Exponent tuple of each element (Fourier or monomial kinds).
    const std::vector<std::vector<int>>& exponents() const noexcept { return exponents_; }

    std::string id() const
    {
        auto join = [](const auto& v) {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i)
                s += (i ? "," : "") + std::to_string(v[i]);
            return s;
        };
        switch (kind_) {
        case Kind::FourierTorus: return "fourier(kmax=" + join(kmax_) + ")";
        case Kind::Monomials: return "monomials(degree=" + std::to_string(degree_) + ",dim=" + std::to_string(dim_) + ")";
        case Kind::StateIdentity: return "identity(dim=" + std::to_string(dim_) + ")";
        }
        return "unknown";
    }

    template <class Vec>
    void evaluate_into(const Vec& x, Row& out) const
    {
        if (x.size() != dim_)
            throw ShapeError("dictionary " + id() + " expects state dimension " + std::to_string(dim_) + ", got " +
                             std::to_string(x.size()));
        out.resize(size_);
        switch (kind_) {
        case Kind::StateIdentity:
            for (Eigen::Index j = 0; j < dim_; ++j)
                out(j) = x(j);
            return;
        case Kind::Monomials:
            for (Eigen::Index m = 0; m < size_; ++m) {
                double v = 1.0;
                const auto& e = exponents_[static_cast<std::size_t>(m)];
                for (Eigen::Index j = 0; j < dim_; ++j)
                    for (int p = 0; p < e[static_cast<std::size_t>(j)]; ++p)
                        v *= x(j);
                out(m) = v;
            }
            return;
        case Kind::FourierTorus: {
            // powers[j][k + kmax] = exp(i k s_j x_j)
            thread_local std::vector<std::vector<std::complex<double>>> powers;
            powers.resize(static_cast<std::size_t>(dim_));
            for (Eigen::Index j = 0; j < dim_; ++j) {
                const int km = kmax_[static_cast<std::size_t>(j)];
                auto& row = powers[static_cast<std::size_t>(j)];
                row.assign(static_cast<std::size_t>(2 * km + 1), 1.0);
                const double arg = scaling_[static_cast<std::size_t>(j)] * x(j);
                for (int k = 1; k <= km; ++k) {
                    const auto e = std::polar(1.0, k * arg);
                    row[static_cast<std::size_t>(km + k)] = e;
                    row[static_cast<std::size_t>(km - k)] = std::conj(e);
                }
            }
            for (Eigen::Index m = 0; m < size_; ++m) {
                const auto& e = exponents_[static_cast<std::size_t>(m)];
                std::complex<double> v = 1.0;
                for (Eigen::Index j = 0; j < dim_; ++j)
                    v *= powers[static_cast<std::size_t>(j)][static_cast<std::size_t>(e[static_cast<std::size_t>(j)] + kmax_[static_cast<std::size_t>(j)])];
                out(m) = v;
            }
            return;
        }
        }
    }

    template <class Vec>
    Row evaluate(const Vec& x) const
    {
        Row r;
        evaluate_into(x, r);
        return r;
    }

    /// Rows psi(X_first), ..., psi(X_{first+count-1}) of a d x T state matrix.
    Eigen::MatrixXcd matrix(const Eigen::MatrixXd& states, Eigen::Index first, Eigen::Index count) const
    {
        if (first < 0 || count < 0 || first + count > states.cols())
            throw SizeError("dictionary matrix: sample range outside the trajectory");
        Eigen::MatrixXcd out(count, size_);
        Row r;
        for (Eigen::Index n = 0; n < count; ++n) {
            evaluate_into(states.col(first + n), r);
            out.row(n) = r;
        }
        return out;
    }

private:
    Dictionary(Kind kind, Eigen::Index dim) : kind_(kind), dim_(dim) {}

    static void enumerate_degree(std::vector<std::vector<int>>& out, std::vector<int>& e, std::size_t pos, int remaining)
    {
        if (pos + 1 == e.size()) {
            e[pos] = remaining;
            out.push_back(e);
            return;
        }
        for (int p = remaining; p >= 0; --p) {
            e[pos] = p;
            enumerate_degree(out, e, pos + 1, remaining - p);
        }
    }

    Kind kind_;
    Eigen::Index dim_ = 0;
    Eigen::Index size_ = 0;
    int degree_ = 0;
    std::vector<int> kmax_;
    std::vector<double> scaling_;
    std::vector<std::vector<int>> exponents_;
};

} // namespace birkhoff
