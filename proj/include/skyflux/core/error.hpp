#pragma once

#include <stdexcept>
#include <string>

namespace skyflux {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnreadableImage : public Error { public: using Error::Error; };
class UnsupportedBitDepth : public Error { public: using Error::Error; };
class SingularMatrix : public Error { public: using Error::Error; };
class DegeneratePose : public Error { public: using Error::Error; };
class DimensionMismatch : public Error { public: using Error::Error; };
class WindowTooShort : public Error { public: using Error::Error; };
class ParseError : public Error { public: using Error::Error; };
class CorruptContainer : public Error { public: using Error::Error; };
class EmptySequence : public Error { public: using Error::Error; };
class InconsistentCounts : public Error { public: using Error::Error; };
class InvalidSpec : public Error { public: using Error::Error; };

} // namespace skyflux
