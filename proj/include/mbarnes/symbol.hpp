#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "mbarnes/errors.hpp"

namespace mb {

enum class SymbolKind {
    IntegrationVariable,
    Parameter,
};

/// A named symbol drawn from a fixed universe. Symbols order and compare by
/// name; the kind decides which symbols may carry a contour fold.
///
/// "eps3" is intentionally absent from the universe: it is eliminated as
/// -eps1-eps2 at construction time everywhere, so the regularization
/// constraint eps1+eps2+eps3 = 0 can never be violated.
class Symbol {
public:
    Symbol(std::string name, SymbolKind kind)
        : name_(std::move(name)), kind_(kind) {
        if (name_ == "eps3")
            throw std::invalid_argument(
                "eps3 is not a symbol; it is eliminated as -eps1-eps2");
    }

    const std::string& name() const { return name_; }
    SymbolKind kind() const { return kind_; }
    bool is_integration_variable() const {
        return kind_ == SymbolKind::IntegrationVariable;
    }

    friend bool operator==(const Symbol& a, const Symbol& b) {
        return a.name_ == b.name_;
    }
    friend bool operator!=(const Symbol& a, const Symbol& b) { return !(a == b); }
    friend bool operator<(const Symbol& a, const Symbol& b) {
        return a.name_ < b.name_;
    }

private:
    std::string name_;
    SymbolKind kind_;
};

/// The default symbol universe used by the builders, the CLI parser and the
/// test suites. Unknown names are parse errors rather than implicit symbols.
inline const std::map<std::string, SymbolKind>& default_universe() {
    static const std::map<std::string, SymbolKind> u = {
        {"z", SymbolKind::IntegrationVariable},
        {"w", SymbolKind::IntegrationVariable},
        {"z1", SymbolKind::IntegrationVariable},
        {"z2", SymbolKind::IntegrationVariable},
        {"z3", SymbolKind::IntegrationVariable},
        {"u", SymbolKind::Parameter},
        {"v", SymbolKind::Parameter},
        {"eps1", SymbolKind::Parameter},
        {"eps2", SymbolKind::Parameter},
        {"lambda1", SymbolKind::Parameter},
        {"lambda2", SymbolKind::Parameter},
        {"lambda3", SymbolKind::Parameter},
        {"lambda4", SymbolKind::Parameter},
        {"lambda5", SymbolKind::Parameter},
        {"d", SymbolKind::Parameter},
        {"a", SymbolKind::Parameter},
        {"b", SymbolKind::Parameter},
        {"nu1", SymbolKind::Parameter},
        {"nu2", SymbolKind::Parameter},
        {"nu3", SymbolKind::Parameter},
    };
    return u;
}

/// Looks a name up in the default universe. Throws ParseError on unknown
/// names (including "eps3").
inline Symbol sym(const std::string& name) {
    auto it = default_universe().find(name);
    if (it == default_universe().end())
        throw ParseError("unknown symbol: '" + name + "'");
    return Symbol(it->first, it->second);
}

} // namespace mb
