#pragma once

#include <stdexcept>
#include <string>

namespace memdecay {

struct EmptyInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LengthMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TooFewItemsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroVarianceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidRangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingVideosError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TooFewParticipantsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TooFewBinsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingScoresError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidSpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File-format violations: bad header, wrong column count, unparsable field.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structurally valid row with an out-of-domain value (lag < 1, response not 0/1).
struct ValueError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace memdecay
