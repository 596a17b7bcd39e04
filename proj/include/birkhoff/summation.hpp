#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace birkhoff {

/// Streaming cascade (pairwise) summation.
///
/// Terms are first summed naively inside fixed-size blocks; completed blocks
/// are merged like a binary counter, so the rounding error grows with
/// log(N) instead of N. Works for scalars and Eigen matrices alike: `T` only
/// needs copy construction and `+=`.
template <class T>
class CascadeSum {
public:
    explicit CascadeSum(T zero, std::size_t block = 128)
        : zero_(zero), partial_(zero), block_(block == 0 ? 1 : block)
    {
    }

    template <class U>
    void add(const U& term)
    {
        partial_ += term;
        bump();
    }

    /// In-place accumulation for expressions that should not materialize a
    /// temporary, e.g. `acc.accumulate([&](auto& s) { s.noalias() += u * v; })`.
    template <class F>
    void accumulate(F&& f)
    {
        f(partial_);
        bump();
    }

    T total() const
    {
        T sum = partial_;
        for (auto it = levels_.rbegin(); it != levels_.rend(); ++it)
            sum += it->first;
        return sum;
    }

    std::size_t count() const noexcept { return count_; }

private:
    void bump()
    {
        ++count_;
        if (++in_block_ == block_) {
            push(std::move(partial_), 0);
            partial_ = zero_;
            in_block_ = 0;
        }
    }

    void push(T value, unsigned level)
    {
        while (!levels_.empty() && levels_.back().second == level) {
            value += levels_.back().first;
            levels_.pop_back();
            ++level;
        }
        levels_.emplace_back(std::move(value), level);
    }

    T zero_;
    T partial_;
    std::size_t block_;
    std::size_t in_block_ = 0;
    std::size_t count_ = 0;
    std::vector<std::pair<T, unsigned>> levels_;
};

/// Cascade sum of `term(0) + ... + term(n-1)`.
template <class T, class F>
T pairwise_sum(std::size_t n, F&& term, T zero)
{
    CascadeSum<T> acc(std::move(zero));
    for (std::size_t i = 0; i < n; ++i)
        acc.add(term(i));
    return acc.total();
}

} // namespace birkhoff
