#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace echoscope {

/// Public-suffix rule set (exact, wildcard and exception rules).
class PublicSuffixList {
public:
    explicit PublicSuffixList(std::string_view rules_text);

    /// The snapshot compiled into the library.
    static const PublicSuffixList& bundled();

    /// Registrable domain (public suffix plus one label) of a lowercase
    /// host, or nothing when the host is itself a public suffix.
    std::optional<std::string> registrable_domain(std::string_view host) const;

    const std::string& version() const { return version_; }
    std::size_t rule_count() const { return rules_.size(); }

private:
    enum class Rule { Exact, Wildcard, Exception };
    std::unordered_map<std::string, Rule> rules_;
    std::unordered_set<std::string> exceptions_;
    std::unordered_set<std::string> wildcards_;
    std::string version_;
};

/// Lowercase registrable-domain checks: non-empty, at least one dot,
/// only [a-z0-9-] labels, no empty labels.
bool is_valid_pld(std::string_view domain);

/// Reduces URLs to pay-level domains. Never throws: unparseable input,
/// IP literals and hosts on the skip list yield nothing.
class PldExtractor {
public:
    PldExtractor();
    PldExtractor(const PublicSuffixList& psl, std::vector<std::string> skip_list);

    std::optional<std::string> operator()(std::string_view url) const;

    static const std::vector<std::string>& default_skip_list();

private:
    const PublicSuffixList* psl_;
    std::unordered_set<std::string> skip_;
};

std::optional<std::string> extract_pld(std::string_view url);

}  // namespace echoscope
