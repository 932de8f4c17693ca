// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace surfhead {

/// Base class for all library errors. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class SingularMatrix : public Error { public: using Error::Error; };
class SingularOrInverted : public Error { public: using Error::Error; };
class NearPiRotation : public Error { public: using Error::Error; };
class DegenerateTriangle : public Error { public: using Error::Error; };
class InvertedTriangle : public Error { public: using Error::Error; };
class TopologyMismatch : public Error { public: using Error::Error; };
class NonTriangleFace : public Error { public: using Error::Error; };
class ParseError : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };
class InvalidCamera : public Error { public: using Error::Error; };
class DimensionMismatch : public Error { public: using Error::Error; };
class DivergedLoss : public Error { public: using Error::Error; };

} // namespace surfhead
