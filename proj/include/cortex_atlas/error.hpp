#pragma once

#include <stdexcept>
#include <string>

namespace cortex {

// Every failure the library reports derives from Error; the CLI maps the
// kind onto a structured error object and a nonzero exit code.
class Error : public std::runtime_error {
public:
    enum class Kind { parse, topology, domain, numeric, io, not_found };

    Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

    const char* kind_name() const noexcept {
        switch (kind_) {
            case Kind::parse: return "parse_error";
            case Kind::topology: return "topology_error";
            case Kind::domain: return "domain_error";
            case Kind::numeric: return "numeric_error";
            case Kind::io: return "io_error";
            case Kind::not_found: return "not_found";
        }
        return "error";
    }

private:
    Kind kind_;
};

struct ParseError : Error {
    explicit ParseError(const std::string& w) : Error(Kind::parse, w) {}
};
struct TopologyError : Error {
    explicit TopologyError(const std::string& w) : Error(Kind::topology, w) {}
};
struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error(Kind::domain, w) {}
};
struct NumericError : Error {
    explicit NumericError(const std::string& w) : Error(Kind::numeric, w) {}
};
struct IoError : Error {
    explicit IoError(const std::string& w) : Error(Kind::io, w) {}
};
struct NotFoundError : Error {
    explicit NotFoundError(const std::string& w) : Error(Kind::not_found, w) {}
};

}  // namespace cortex
