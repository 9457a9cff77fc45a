#pragma once

#include <stdexcept>
#include <string>

namespace wofe3d {

// A 2x2 contingency table has an empty cell; `cell` identifies which one
// (0 = E&M, 1 = E&!M, 2 = !E&M, 3 = !E&!M; -1 when not applicable).
class ZeroCellError : public std::runtime_error {
public:
    explicit ZeroCellError(int cell);
    explicit ZeroCellError(const std::string& what, int cell = -1);
    int cell() const { return cell_; }

private:
    int cell_ = -1;
};

class DegenerateTrainingError : public std::runtime_error {
public:
    explicit DegenerateTrainingError(const std::string& what) : std::runtime_error(what) {}
};

class EmptyModelError : public std::runtime_error {
public:
    explicit EmptyModelError(const std::string& what) : std::runtime_error(what) {}
};

class NoIntersectionError : public std::runtime_error {
public:
    explicit NoIntersectionError(const std::string& what) : std::runtime_error(what) {}
};

class SchemaVersionError : public std::runtime_error {
public:
    explicit SchemaVersionError(const std::string& what) : std::runtime_error(what) {}
};

// Pipeline failure carrying the stage label it happened in.
class PipelineError : public std::runtime_error {
public:
    PipelineError(std::string stage, const std::string& cause);
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

}  // namespace wofe3d
