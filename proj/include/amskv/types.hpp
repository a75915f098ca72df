// Copyright (C) 2026 The amskv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace amskv {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

/// Thrown when a caller breaks a documented precondition (bad index, size mismatch).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Thrown for configuration values outside their valid range. Carries the
/// offending line when the value came from a config file.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what, int line = 0)
        : std::invalid_argument(line > 0 ? "line " + std::to_string(line) + ": " + what : what), m_line(line) {}

    int line() const noexcept { return m_line; }

private:
    int m_line;
};

/// Thrown when an operation has no data to work from (e.g. an empty usage window).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when the paged block pool cannot satisfy an allocation.
class AllocationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define AMSKV_EXPECT(cond, msg)                              \
    do {                                                     \
        if (!(cond)) throw ::amskv::ContractViolation(msg);  \
    } while (0)

/// Element-visit counters per compression stage. Used to check that the
/// allocation layer stays linear in the cache length.
struct OpCounters {
    std::uint64_t mass_ops = 0;     ///< usage aggregation, pooling, normalization
    std::uint64_t ema_ops = 0;
    std::uint64_t segment_ops = 0;  ///< prefix sums, cut search, split/merge
    std::uint64_t quota_ops = 0;
    std::uint64_t select_ops = 0;
    std::uint64_t gather_ops = 0;

    OpCounters& operator+=(const OpCounters& o) {
        mass_ops += o.mass_ops;
        ema_ops += o.ema_ops;
        segment_ops += o.segment_ops;
        quota_ops += o.quota_ops;
        select_ops += o.select_ops;
        gather_ops += o.gather_ops;
        return *this;
    }
};

}  // namespace amskv
