#pragma once

#include <stdexcept>
#include <string>

namespace pitchfuse {

/// Base class for failures caused by input data (files, tracks, buffers)
/// rather than by the caller's usage of the API.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnreadableFile : public DataError {
public:
    using DataError::DataError;
};

class UnsupportedFormat : public DataError {
public:
    using DataError::DataError;
};

class EmptyAudio : public DataError {
public:
    using DataError::DataError;
};

class MalformedCsv : public DataError {
public:
    using DataError::DataError;
};

/// Two tracks (or a track and a spectrogram) do not share a time grid.
class GridMismatch : public DataError {
public:
    using DataError::DataError;
};

}  // namespace pitchfuse
