#pragma once

#include <stdexcept>
#include <string>

namespace sepsikit {

// Bad user input: unreadable files, malformed records, out-of-range arguments.
// The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Violated interface contract: shape mismatches, id mismatches, split overflow.
// The CLI maps this to exit code 2.
class ContractError : public std::runtime_error {
public:
    explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sepsikit
