#pragma once

#include <stdexcept>
#include <string>

namespace vqloc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Run-length data that does not describe a valid non-empty mask.
class MaskError : public Error {
public:
    using Error::Error;
};

/// Caller-supplied input is invalid (bad arguments, missing paths, bad config).
class InputError : public Error {
public:
    using Error::Error;
};

/// A persisted artifact does not follow its schema.
class FormatError : public InputError {
public:
    using InputError::InputError;
};

/// A frame listing skips an index.
class FrameGapError : public FormatError {
public:
    explicit FrameGapError(int missing_frame)
        : FormatError("missing frame " + std::to_string(missing_frame)), missing_frame_(missing_frame) {}

    int missing_frame() const noexcept { return missing_frame_; }

private:
    int missing_frame_;
};

/// A segmenter/extractor/tracker failed on a frame.
class BackendError : public Error {
public:
    BackendError(int frame_index, const std::string& what)
        : Error("frame " + std::to_string(frame_index) + ": " + what), frame_index_(frame_index) {}

    int frame_index() const noexcept { return frame_index_; }

private:
    int frame_index_;
};

/// The backend cannot serve the requested view (e.g. a crop of a recorded artifact).
class UnsupportedViewError : public BackendError {
public:
    using BackendError::BackendError;
};

}  // namespace vqloc
