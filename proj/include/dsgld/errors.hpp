// errors.hpp — exception types thrown by the dsgld library.
#pragma once

#include <stdexcept>
#include <string>

namespace dsgld {

// Base class; every library error derives from it so callers can catch one type.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid graph/topology/mixing-matrix construction (disconnected entry, bad sizes...).
struct ConstructionError final : Error {
    using Error::Error;
    explicit ConstructionError(const std::string& what) : Error("construction: " + what) {}
};

// Invalid model construction or gradient query (bad batch size, non-PD posterior...).
struct ModelError final : Error {
    explicit ModelError(const std::string& what) : Error("model: " + what) {}
};

// Dataset loading/partitioning problems; carries row/column context where known.
struct DataError final : Error {
    explicit DataError(const std::string& what) : Error("data: " + what) {}
};

// Sampler state inconsistencies (dimension mismatch, inadmissible stepsize...).
struct StateError final : Error {
    explicit StateError(const std::string& what) : Error("sampler: " + what) {}
};

// Metric preconditions violated (too few trials, asymmetric covariance...).
struct MetricError final : Error {
    explicit MetricError(const std::string& what) : Error("metric: " + what) {}
};

// Theory-constant evaluation outside its mathematical domain.
struct DomainError final : Error {
    explicit DomainError(const std::string& what) : Error("theory: " + what) {}
};

// Experiment orchestration failures; wraps lower-level errors with run context.
struct HarnessError final : Error {
    explicit HarnessError(const std::string& what) : Error("harness: " + what) {}
};

} // namespace dsgld
