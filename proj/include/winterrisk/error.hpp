#pragma once

#include <stdexcept>
#include <string>

namespace winterrisk {

/// Bad or inconsistent input: schema violations, misaligned series,
/// out-of-range parameters. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation that cannot produce a meaningful result from valid-looking
/// input (rank deficiency, degenerate fits). The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace winterrisk
