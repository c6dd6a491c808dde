#pragma once

#include <stdexcept>
#include <string>

namespace lomtree {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

/// A dataset record could not be parsed; the message carries the offending text.
class MalformedRecord : public Error {
public:
  using Error::Error;
};

/// Fewer examples than the splitting rule can partition.
class TooFewExamples : public Error {
public:
  using Error::Error;
};

/// A gradient step produced a non-finite weight; the step size diverged.
class NonFiniteUpdate : public Error {
public:
  using Error::Error;
};

/// No orphan leaf can be recycled into the requested split location.
class SwapUnavailable : public Error {
public:
  using Error::Error;
};

/// Prediction requested before the tree saw any training example.
class UntrainedTree : public Error {
public:
  using Error::Error;
};

/// A leaf without class counts has no majority label.
class EmptyLeaf : public Error {
public:
  using Error::Error;
};

/// Split statistics violate their invariants beyond tolerance.
class InvalidStats : public Error {
public:
  using Error::Error;
};

/// Balancing factor is 0 or 1; the purity bound is undefined.
class DegenerateBeta : public Error {
public:
  using Error::Error;
};

/// The evaluated cohort at a node is empty.
class NoExamplesReachNode : public Error {
public:
  using Error::Error;
};

/// A label tree needs at least two distinct classes.
class TooFewClasses : public Error {
public:
  using Error::Error;
};

/// Label was not part of the tree's label set.
class UnknownLabel : public Error {
public:
  using Error::Error;
};

/// Prediction requested from a model with no trained regressors.
class UntrainedModel : public Error {
public:
  using Error::Error;
};

/// Model file is unreadable, truncated, or of the wrong format/version.
class ModelFormatError : public Error {
public:
  using Error::Error;
};

/// Configuration value outside its allowed domain.
class InvalidConfig : public Error {
public:
  using Error::Error;
};

/// Filesystem-level failure (missing file, unreadable stream).
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace lomtree
