#pragma once

#include <stdexcept>
#include <string>

namespace arbsim {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Entity kind tag not present in the kind registry.
class UnknownKindError : public Error {
public:
    UnknownKindError(std::string entity_id, std::string kind_tag)
        : Error("unknown kind '" + kind_tag + "' for entity '" + entity_id + "'"),
          entity_id(std::move(entity_id)),
          kind_tag(std::move(kind_tag)) {}
    std::string entity_id;
    std::string kind_tag;
};

/// Measurement references an object id that does not exist.
class DanglingMeasurementError : public Error {
public:
    explicit DanglingMeasurementError(std::string id)
        : Error("measurement references absent object '" + id + "'"), id(std::move(id)) {}
    std::string id;
};

/// Behavior distribution requested for a static object.
class StaticObjectError : public Error {
public:
    explicit StaticObjectError(std::string id)
        : Error("behavior distribution undefined for static object '" + id + "'"),
          id(std::move(id)) {}
    std::string id;
};

/// Significant object has no internal link.
class MissingLinkError : public Error {
public:
    explicit MissingLinkError(std::string id)
        : Error("object '" + id + "' has no internal link"), id(std::move(id)) {}
    std::string id;
};

/// Non-positive integration step.
class InvalidStepError : public Error {
public:
    explicit InvalidStepError(double dt)
        : Error("invalid integration step dt=" + std::to_string(dt)) {}
};

/// Scenario text violates the schema (unknown/missing keys, wrong types).
class SchemaError : public Error {
public:
    SchemaError(std::string path, std::string reason)
        : Error("schema error at " + path + ": " + reason),
          path(std::move(path)),
          reason(std::move(reason)) {}
    std::string path;
    std::string reason;
};

/// Scenario is well-formed but semantically invalid (bad sums, dangling refs).
class SemanticError : public Error {
public:
    SemanticError(std::string path, std::string reason)
        : Error("semantic error at " + path + ": " + reason),
          path(std::move(path)),
          reason(std::move(reason)) {}
    std::string path;
    std::string reason;
};

/// File could not be read or written.
class IoError : public Error {
public:
    explicit IoError(std::string path)
        : Error("i/o error on '" + path + "'"), path(std::move(path)) {}
    std::string path;
};

}  // namespace arbsim
