#pragma once

#include <stdexcept>
#include <string>

namespace hfc {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shape/axis mismatches between tensors or layer wiring.
class DimensionError : public Error {
public:
    using Error::Error;
};

// A hyperparameter or argument outside its valid range.
class ParameterError : public Error {
public:
    using Error::Error;
};

// Data content that violates a contract (non-one-hot labels, empty classes, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Inconsistent model specification (channel chaining, kernel parity, ...).
class SpecError : public Error {
public:
    using Error::Error;
};

// Optimizer or layer state misuse (e.g. stepping without gradients).
class StateError : public Error {
public:
    using Error::Error;
};

// Bad run configuration (head/label mismatch, invalid TrainConfig, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Problems with external data artifacts (files, manifests, checkpoints).
class DataError : public Error {
public:
    using Error::Error;
};

// Image decode/ingestion failure; message carries the offending path.
class IngestionError : public DataError {
public:
    using DataError::DataError;
};

class CheckpointError : public DataError {
public:
    using DataError::DataError;
};

class CorruptCheckpointError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

class CheckpointVersionError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

class TruncatedCheckpointError : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

class ClusteringError : public Error {
public:
    using Error::Error;
};

class EvalError : public Error {
public:
    using Error::Error;
};

class ComparisonError : public Error {
public:
    using Error::Error;
};

// Non-finite values where the contract requires finite ones.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace hfc
