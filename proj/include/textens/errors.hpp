#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace textens {

// Base class for all library errors. Everything thrown by textens derives
// from this, so callers can catch one type at the CLI boundary.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& path, const std::string& what)
        : Error("io error: " + path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

class MalformedLine : public Error {
public:
    MalformedLine(std::size_t line_no, const std::string& what)
        : Error("malformed line " + std::to_string(line_no) + ": " + what),
          line_no_(line_no) {}
    std::size_t line_no() const { return line_no_; }

private:
    std::size_t line_no_;
};

class EmptyCorpus : public Error {
public:
    EmptyCorpus() : Error("corpus is empty") {}
};

class EmptyVocabulary : public Error {
public:
    EmptyVocabulary() : Error("corpus tokenizes to an empty vocabulary") {}
};

class EmptyTestSet : public Error {
public:
    EmptyTestSet() : Error("test set is empty") {}
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t expected, std::size_t got)
        : Error("dimension mismatch: expected " + std::to_string(expected) +
                ", got " + std::to_string(got)) {}
};

class InvalidPartitionCount : public Error {
public:
    InvalidPartitionCount() : Error("partition count must be >= 1") {}
};

class ZeroVector : public Error {
public:
    ZeroVector() : Error("cosine distance is undefined for a zero vector") {}
};

class SingleClassCorpus : public Error {
public:
    SingleClassCorpus() : Error("training corpus contains a single class") {}
};

class InsufficientClassCount : public Error {
public:
    InsufficientClassCount(const std::string& label, std::size_t have,
                           std::size_t need)
        : Error("class " + label + " has " + std::to_string(have) +
                " examples, need >= " + std::to_string(need)) {}
};

class LengthMismatch : public Error {
public:
    LengthMismatch(std::size_t expected, std::size_t got)
        : Error("length mismatch: expected " + std::to_string(expected) +
                ", got " + std::to_string(got)) {}
};

class WrongArity : public Error {
public:
    WrongArity(std::size_t expected, std::size_t got)
        : Error("expected " + std::to_string(expected) + " inputs, got " +
                std::to_string(got)) {}
};

class InvalidParams : public Error {
public:
    explicit InvalidParams(const std::string& what)
        : Error("invalid parameters: " + what) {}
};

class InvalidSpec : public Error {
public:
    explicit InvalidSpec(const std::string& what)
        : Error("invalid generator spec: " + what) {}
};

class UnknownLabel : public Error {
public:
    explicit UnknownLabel(const std::string& label)
        : Error("unknown label: " + label) {}
};

class ArchiveError : public Error {
public:
    explicit ArchiveError(const std::string& what)
        : Error("archive error: " + what) {}
};

}  // namespace textens
