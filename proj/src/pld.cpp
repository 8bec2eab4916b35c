#include "echoscope/pld.hpp"

#include <algorithm>
#include <cctype>

namespace echoscope {

namespace detail {
extern const std::string_view kPublicSuffixSnapshot;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_label_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_ipv4(std::string_view host) {
    int parts = 0;
    std::size_t start = 0;
    while (start <= host.size()) {
        const auto dot = host.find('.', start);
        const auto part = host.substr(start, dot == std::string_view::npos ? host.npos : dot - start);
        if (!all_digits(part) || part.size() > 3) return false;
        ++parts;
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return parts == 4;
}

}  // namespace

PublicSuffixList::PublicSuffixList(std::string_view rules_text) {
    std::size_t pos = 0;
    while (pos < rules_text.size()) {
        auto eol = rules_text.find('\n', pos);
        if (eol == std::string_view::npos) eol = rules_text.size();
        auto line = trim(rules_text.substr(pos, eol - pos));
        pos = eol + 1;
        if (line.starts_with("//")) {
            constexpr std::string_view tag = "// VERSION:";
            if (line.starts_with(tag)) version_ = std::string(trim(line.substr(tag.size())));
            continue;
        }
        if (line.empty()) continue;
        std::string rule(line);
        std::transform(rule.begin(), rule.end(), rule.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (rule.starts_with('!')) {
            exceptions_.insert(rule.substr(1));
            rules_.emplace(rule.substr(1), Rule::Exception);
        } else if (rule.starts_with("*.")) {
            wildcards_.insert(rule.substr(2));
            rules_.emplace(rule, Rule::Wildcard);
        } else {
            rules_.emplace(rule, Rule::Exact);
        }
    }
}

const PublicSuffixList& PublicSuffixList::bundled() {
    static const PublicSuffixList list(detail::kPublicSuffixSnapshot);
    return list;
}

std::optional<std::string> PublicSuffixList::registrable_domain(std::string_view host) const {
    if (host.empty()) return std::nullopt;

    // Label start offsets, left to right.
    std::vector<std::size_t> starts{0};
    for (std::size_t i = 0; i < host.size(); ++i)
        if (host[i] == '.') starts.push_back(i + 1);
    const std::size_t n = starts.size();

    // Number of labels in the longest matching public suffix. The
    // implicit "*" rule makes the last label a suffix.
    std::size_t suffix_labels = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const auto candidate = host.substr(starts[i]);
        const std::size_t labels = n - i;
        const std::string key(candidate);
        if (exceptions_.contains(key)) {
            // Exception rules win outright; the suffix is the rule minus its first label.
            suffix_labels = labels - 1;
            break;
        }
        if (labels <= suffix_labels) continue;
        if (auto it = rules_.find(key); it != rules_.end() && it->second == Rule::Exact)
            suffix_labels = labels;
        if (i + 1 < n && wildcards_.contains(std::string(host.substr(starts[i + 1]))))
            suffix_labels = std::max(suffix_labels, labels);
    }

    if (suffix_labels >= n) return std::nullopt;
    return std::string(host.substr(starts[n - suffix_labels - 1]));
}

bool is_valid_pld(std::string_view domain) {
    if (domain.empty() || domain.find('.') == std::string_view::npos) return false;
    std::size_t label_len = 0;
    for (char c : domain) {
        if (c == '.') {
            if (label_len == 0) return false;
            label_len = 0;
        } else if (is_label_char(c)) {
            ++label_len;
        } else {
            return false;
        }
    }
    return label_len > 0;
}

const std::vector<std::string>& PldExtractor::default_skip_list() {
    static const std::vector<std::string> list{
        "bit.ly", "t.co", "goo.gl", "ow.ly", "tinyurl.com", "buff.ly", "dlvr.it", "ift.tt",
        "fb.me", "tr.im", "is.gd", "j.mp", "wp.me", "trib.al", "lnkd.in", "shar.es",
        "su.pr", "po.st", "tiny.cc", "bitly.com", "rebrand.ly", "cutt.ly", "amzn.to"};
    return list;
}

PldExtractor::PldExtractor() : PldExtractor(PublicSuffixList::bundled(), default_skip_list()) {}

PldExtractor::PldExtractor(const PublicSuffixList& psl, std::vector<std::string> skip_list)
    : psl_(&psl), skip_(skip_list.begin(), skip_list.end()) {}

std::optional<std::string> PldExtractor::operator()(std::string_view url) const {
    url = trim(url);
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos || scheme_end == 0) return std::nullopt;
    for (char c : url.substr(0, scheme_end))
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.')
            return std::nullopt;

    auto authority = url.substr(scheme_end + 3);
    authority = authority.substr(0, authority.find_first_of("/?#"));
    if (const auto at = authority.rfind('@'); at != std::string_view::npos)
        authority.remove_prefix(at + 1);
    if (authority.starts_with('[')) return std::nullopt;  // IPv6 literal
    authority = authority.substr(0, authority.find(':'));

    std::string host(authority);
    std::transform(host.begin(), host.end(), host.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    while (!host.empty() && host.back() == '.') host.pop_back();
    if (!is_valid_pld(host) || is_ipv4(host)) return std::nullopt;

    auto pld = psl_->registrable_domain(host);
    if (!pld || skip_.contains(*pld) || skip_.contains(host)) return std::nullopt;
    return pld;
}

std::optional<std::string> extract_pld(std::string_view url) {
    static const PldExtractor extractor;
    return extractor(url);
}

}  // namespace echoscope
