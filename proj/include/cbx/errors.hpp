#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cbx {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape or size mismatch between operands (block orders, row counts, ...).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A NaN or infinity was about to enter an operator, vector, or file.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// Malformed CBX text input. `token` is the 1-based index of the offending
/// whitespace-separated token.
class FormatError : public Error {
public:
    FormatError(std::size_t token, const std::string& what)
        : Error("token " + std::to_string(token) + ": " + what), token_(token) {}

    std::size_t token() const noexcept { return token_; }

private:
    std::size_t token_;
};

/// An m-by-m block failed LU factorization. `column` is the zero-based
/// elimination column whose pivot fell below the singularity threshold.
class SingularBlockError : public Error {
public:
    SingularBlockError(int column, const std::string& what)
        : Error(what), column_(column) {}

    int column() const noexcept { return column_; }

private:
    int column_;
};

/// Banded forward elimination met a singular pivot block. `block_row` is the
/// zero-based block row; this is the "A-tilde is singular" failure mode.
class SingularPivotError : public Error {
public:
    SingularPivotError(int block_row, const std::string& what)
        : Error(what), block_row_(block_row) {}

    int block_row() const noexcept { return block_row_; }

private:
    int block_row_;
};

/// The capacitance matrix of a cyclic solve is singular.
class SingularCapacitanceError : public Error {
public:
    using Error::Error;
};

/// The dense reference elimination met a singular pivot. `column` is the
/// zero-based scalar elimination column.
class SingularDenseError : public Error {
public:
    SingularDenseError(int column, const std::string& what)
        : Error(what), column_(column) {}

    int column() const noexcept { return column_; }

private:
    int column_;
};

}  // namespace cbx
