#pragma once

#include <stdexcept>
#include <string>

namespace iwa {

// Base class for everything this library throws on its own behalf.
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Two values from different ring contexts were combined.
struct context_mismatch : error {
    explicit context_mismatch(const std::string& what) : error(what) {}
};

// Element is not a unit at the declared precision.
struct not_invertible : error {
    explicit not_invertible(const std::string& what) : error(what) {}
};

// The requested computation needs more T-adic truncation than the context has.
struct truncation_too_short : error {
    explicit truncation_too_short(const std::string& what) : error(what) {}
};

// Input is zero (or otherwise featureless) at the declared precision, so the
// requested invariant has no meaning there.
struct indeterminate_at_precision : error {
    explicit indeterminate_at_precision(const std::string& what) : error(what) {}
};

// A verdict could not be reached at the declared precision; raising (a, m, or
// the level horizon) may resolve it.
struct undetermined_at_precision : error {
    explicit undetermined_at_precision(const std::string& what) : error(what) {}
};

// Malformed descriptor / user input.
struct input_error : error {
    explicit input_error(const std::string& what) : error(what) {}
};

}  // namespace iwa
