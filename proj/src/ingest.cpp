#include "echoscope/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "echoscope/log.hpp"

namespace echoscope {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
    throw InputError(source + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    return in;
}

/// Splits a two-column CSV record. Quoting is not supported; neither
/// column may contain a comma.
bool split_pair(std::string_view line, std::string_view& a, std::string_view& b) {
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
        return false;
    a = trim(line.substr(0, comma));
    b = trim(line.substr(comma + 1));
    return !a.empty() && !b.empty();
}

/// Reads the header line, skipping blank lines and a UTF-8 BOM.
void expect_header(std::istream& in, const std::string& source, std::string_view expected,
                   std::size_t& line_no) {
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        view = trim(view);
        if (view.empty()) continue;
        if (lower(view) != expected) fail(source, line_no, "expected header '" + std::string(expected) + "'");
        return;
    }
    fail(source, line_no, "missing header '" + std::string(expected) + "'");
}

}  // namespace

namespace {

// "YYYY-MM-DD" or "YYYY-MM-DDTHH:MM:SSZ", always UTC.
std::int64_t parse_iso_time(std::string_view part) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    const std::string s(part);
    char tail = 0;
    const int n = std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &sec, &tail);
    const bool date_only = n == 3 && s.size() == 10;
    const bool full = n == 7 && tail == 'Z' && s.size() == 20;
    const std::chrono::year_month_day ymd{std::chrono::year(y), std::chrono::month(unsigned(mo)),
                                          std::chrono::day(unsigned(d))};
    if ((!date_only && !full) || !ymd.ok() || h > 23 || mi > 59 || sec > 60)
        throw InputError("bad window bound '" + s + "'");
    const auto days = std::chrono::sys_days(ymd).time_since_epoch().count();
    return std::int64_t(days) * 86400 + h * 3600 + mi * 60 + sec;
}

}  // namespace

Window parse_window(const std::string& text) {
    const auto sep = text.find("..");
    if (sep == std::string::npos) throw InputError("window must look like FROM..TO: " + text);
    Window w;
    auto read = [&](std::string_view part, std::int64_t& out) {
        part = trim(part);
        if (part.empty()) return;
        if (part.size() >= 10 && part[4] == '-' && part[7] == '-') {
            out = parse_iso_time(part);
            return;
        }
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
        if (ec != std::errc() || ptr != part.data() + part.size())
            throw InputError("bad window bound '" + std::string(part) + "'");
    };
    read(std::string_view(text).substr(0, sep), w.from);
    read(std::string_view(text).substr(sep + 2), w.to);
    if (w.from > w.to) throw InputError("window start after end: " + text);
    return w;
}

std::string format_window(const Window& w) {
    if (w.unbounded()) return "..";
    std::string out;
    if (w.from != Window{}.from) out += std::to_string(w.from);
    out += "..";
    if (w.to != Window{}.to) out += std::to_string(w.to);
    return out;
}

// ---------------------------------------------------------------- registry

UserRegistry::UserRegistry(const UserRegistry& other) {
    for (const auto& n : other.names_) intern(n);
}

UserRegistry& UserRegistry::operator=(const UserRegistry& other) {
    if (this != &other) {
        UserRegistry copy(other);
        *this = std::move(copy);
    }
    return *this;
}

UserId UserRegistry::intern(std::string_view name) {
    if (auto it = index_.find(name); it != index_.end()) return it->second;
    const auto id = static_cast<UserId>(names_.size());
    names_.emplace_back(name);
    index_.emplace(names_.back(), id);
    return id;
}

std::optional<UserId> UserRegistry::find(std::string_view name) const {
    if (auto it = index_.find(name); it != index_.end()) return it->second;
    return std::nullopt;
}

// ------------------------------------------------------------------ scores

std::optional<double> score_from_label(std::string_view text) {
    const auto label = lower(trim(text));
    if (label == "left") return 0.0;
    if (label == "left-center") return 0.25;
    if (label == "center" || label == "least-biased") return 0.5;
    if (label == "right-center") return 0.75;
    if (label == "right") return 1.0;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), value);
    if (ec != std::errc() || ptr != label.data() + label.size()) return std::nullopt;
    if (!(value >= 0.0 && value <= 1.0)) return std::nullopt;
    return value;
}

DomainScoreTable parse_domain_scores(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_domain_scores(in, path.string());
}

DomainScoreTable parse_domain_scores(std::istream& in, const std::string& source) {
    std::size_t line_no = 0;
    expect_header(in, source, "domain,score", line_no);
    DomainScoreTable table;
    std::map<std::string, std::size_t, std::less<>> first_seen;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = trim(line);
        if (view.empty()) continue;
        std::string_view domain, label;
        if (!split_pair(view, domain, label)) fail(source, line_no, "malformed record");
        const auto key = lower(domain);
        if (!is_valid_pld(key)) fail(source, line_no, "invalid domain '" + std::string(domain) + "'");
        const auto score = score_from_label(label);
        if (!score) fail(source, line_no, "unknown label or score out of [0,1]: '" + std::string(label) + "'");
        if (auto it = first_seen.find(key); it != first_seen.end())
            fail(source, line_no, "duplicate domain '" + key + "' (first on line " + std::to_string(it->second) + ")");
        first_seen.emplace(key, line_no);
        table.emplace(key, *score);
    }
    if (table.empty()) throw InputError(source + ": no domain scores");
    return table;
}

// ------------------------------------------------------------------- edges

FollowEdgeList parse_follow_edges(const std::filesystem::path& path, UserRegistry& users) {
    auto in = open_input(path);
    return parse_follow_edges(in, users, path.string());
}

FollowEdgeList parse_follow_edges(std::istream& in, UserRegistry& users, const std::string& source) {
    std::size_t line_no = 0;
    expect_header(in, source, "follower,friend", line_no);
    FollowEdgeList list;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = trim(line);
        if (view.empty()) continue;
        std::string_view follower, friend_;
        if (!split_pair(view, follower, friend_)) fail(source, line_no, "malformed record");
        if (follower == friend_) {
            ++list.self_loops;
            continue;
        }
        const auto a = users.intern(follower);
        const auto b = users.intern(friend_);
        list.edges.emplace_back(a, b);
    }
    std::sort(list.edges.begin(), list.edges.end());
    const auto before = list.edges.size();
    list.edges.erase(std::unique(list.edges.begin(), list.edges.end()), list.edges.end());
    list.edges.shrink_to_fit();
    list.duplicates = before - list.edges.size();
    if (list.self_loops > 0) spdlog::warn("{}: dropped {} self-loop edge(s)", source, list.self_loops);
    return list;
}

// ------------------------------------------------------------------ events

EventLog::EventLog(std::vector<TweetEvent> events, std::size_t user_count) : events_(std::move(events)) {
    std::stable_sort(events_.begin(), events_.end(), [](const TweetEvent& a, const TweetEvent& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.id < b.id;
    });
    std::size_t n_users = user_count;
    for (const auto& e : events_) n_users = std::max<std::size_t>(n_users, e.author + 1);
    offsets_.assign(n_users + 1, 0);
    for (const auto& e : events_) ++offsets_[e.author + 1];
    for (std::size_t u = 0; u < n_users; ++u) offsets_[u + 1] += offsets_[u];
    positions_.resize(events_.size());
    std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (std::uint32_t i = 0; i < events_.size(); ++i) positions_[cursor[events_[i].author]++] = i;
}

std::span<const std::uint32_t> EventLog::positions_of(UserId user) const {
    if (user + 1 >= offsets_.size()) return {};
    return std::span<const std::uint32_t>(positions_).subspan(offsets_[user], offsets_[user + 1] - offsets_[user]);
}

EventLog parse_events(const std::filesystem::path& path, UserRegistry& users, const PldExtractor& extractor) {
    auto in = open_input(path);
    return parse_events(in, users, extractor, path.string());
}

EventLog parse_events(std::istream& in, UserRegistry& users, const PldExtractor& extractor,
                      const std::string& source) {
    std::vector<TweetEvent> events;
    std::size_t dropped = 0, total_urls = 0;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            fail(source, line_no, std::string("malformed JSON: ") + e.what());
        }
        if (!obj.is_object()) fail(source, line_no, "record is not an object");

        auto get_string = [&](const char* key) -> std::string {
            auto it = obj.find(key);
            if (it == obj.end() || !it->is_string() || it->get_ref<const std::string&>().empty())
                fail(source, line_no, std::string("missing or non-string '") + key + "'");
            return it->get<std::string>();
        };

        TweetEvent ev;
        ev.id = get_string("id");
        ev.author = users.intern(get_string("author"));

        auto ts = obj.find("ts");
        if (ts == obj.end() || !ts->is_number_integer()) fail(source, line_no, "missing or non-integer 'ts'");
        ev.timestamp = ts->get<std::int64_t>();
        if (ev.timestamp < 0) fail(source, line_no, "negative timestamp");

        const auto kind = get_string("kind");
        if (kind == "original") ev.kind = EventKind::Original;
        else if (kind == "retweet") ev.kind = EventKind::Retweet;
        else fail(source, line_no, "unknown kind '" + kind + "'");

        auto orig = obj.find("orig_author");
        const bool has_orig = orig != obj.end() && !orig->is_null();
        if (ev.kind == EventKind::Retweet) {
            if (!has_orig) fail(source, line_no, "retweet lacks 'orig_author'");
            const auto name = get_string("orig_author");
            if (name == users.name(ev.author)) fail(source, line_no, "retweet of own tweet");
            ev.original_author = users.intern(name);
        } else if (has_orig) {
            fail(source, line_no, "original tweet carries 'orig_author'");
        }

        auto urls = obj.find("urls");
        if (urls != obj.end() && !urls->is_null()) {
            if (!urls->is_array()) fail(source, line_no, "'urls' is not an array");
            for (const auto& u : *urls) {
                if (!u.is_string()) fail(source, line_no, "'urls' entry is not a string");
                ++total_urls;
                if (auto pld = extractor(u.get_ref<const std::string&>()))
                    ev.domains.push_back(std::move(*pld));
                else
                    ++dropped;
            }
        }
        events.push_back(std::move(ev));
    }
    EventLog log(std::move(events), users.size());
    log.dropped_urls = dropped;
    log.total_urls = total_urls;
    if (dropped > 0) spdlog::info("{}: {} URL(s) without a pay-level domain", source, dropped);
    return log;
}

std::vector<UserId> parse_seeds(const std::filesystem::path& path, UserRegistry& users) {
    auto in = open_input(path);
    std::vector<UserId> seeds;
    std::string line;
    while (std::getline(in, line)) {
        const auto view = trim(line);
        if (view.empty() || view.starts_with('#')) continue;
        seeds.push_back(users.intern(view));
    }
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    return seeds;
}

DatasetBundle load_dataset(const DatasetPaths& paths) {
    DatasetBundle bundle;
    bundle.scores = parse_domain_scores(paths.scores);
    bundle.edges = parse_follow_edges(paths.edges, bundle.users);
    if (paths.seeds) {
        bundle.seeds = parse_seeds(*paths.seeds, bundle.users);
    } else {
        for (const auto& [a, b] : bundle.edges.edges)
            if (bundle.seeds.empty() || bundle.seeds.back() != a) bundle.seeds.push_back(a);
    }
    bundle.log = parse_events(paths.events, bundle.users);
    return bundle;
}

// ----------------------------------------------------------------- writers

void write_domain_scores(std::ostream& out, const DomainScoreTable& table) {
    out << "domain,score\n";
    char buf[32];
    for (const auto& [domain, score] : table) {
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, score);
        out << domain << ',' << std::string_view(buf, end - buf) << '\n';
    }
}

void write_follow_edges(std::ostream& out, const FollowEdgeList& edges, const UserRegistry& users) {
    // Name order, so the output does not depend on interning order.
    std::vector<std::pair<std::string_view, std::string_view>> rows;
    rows.reserve(edges.edges.size());
    for (const auto& [a, b] : edges.edges) rows.emplace_back(users.name(a), users.name(b));
    std::sort(rows.begin(), rows.end());
    out << "follower,friend\n";
    for (const auto& [a, b] : rows) out << a << ',' << b << '\n';
}

void write_events(std::ostream& out, const EventLog& log, const UserRegistry& users) {
    for (const auto& e : log.events()) {
        nlohmann::ordered_json obj;
        obj["id"] = e.id;
        obj["author"] = users.name(e.author);
        obj["ts"] = e.timestamp;
        obj["kind"] = e.kind == EventKind::Original ? "original" : "retweet";
        if (e.original_author) obj["orig_author"] = users.name(*e.original_author);
        auto urls = nlohmann::json::array();
        for (const auto& d : e.domains) urls.push_back("http://" + d + "/");
        obj["urls"] = std::move(urls);
        out << obj.dump() << '\n';
    }
}

void write_seeds(std::ostream& out, std::span<const UserId> seeds, const UserRegistry& users) {
    for (auto s : seeds) out << users.name(s) << '\n';
}

// -------------------------------------------------------------- validation

nlohmann::ordered_json ValidationReport::to_json() const {
    nlohmann::ordered_json j;
    j["errors"] = error_count();
    j["warnings"] = warning_count();
    j["users"] = users;
    j["seeds"] = seeds;
    j["edges"] = edges;
    j["self_loops"] = self_loops;
    j["duplicate_edges"] = duplicate_edges;
    j["events"] = events;
    j["originals"] = originals;
    j["retweets"] = retweets;
    j["events_with_scored_domain"] = events_with_scored_domain;
    j["scored_event_fraction"] = scored_event_fraction;
    j["dropped_urls"] = dropped_urls;
    j["scored_domains"] = scored_domains;
    j["dangling_retweets"] = dangling_retweets;
    j["seeds_without_friends"] = seeds_without_friends;
    j["seeds_unknown"] = seeds_unknown;
    j["duplicate_tweet_ids"] = duplicate_tweet_ids;
    return j;
}

ValidationReport validate_dataset(const DatasetBundle& bundle) {
    ValidationReport r;
    const auto& events = bundle.log.events();
    const std::size_t n_users = bundle.users.size();

    std::vector<char> has_friends(n_users, 0), is_author(n_users, 0), in_edges(n_users, 0);
    for (const auto& [a, b] : bundle.edges.edges) {
        has_friends[a] = 1;
        in_edges[a] = in_edges[b] = 1;
    }
    for (const auto& e : events) is_author[e.author] = 1;

    for (auto s : bundle.seeds) {
        if (!has_friends[s]) r.seeds_without_friends.push_back(bundle.users.name(s));
        if (!has_friends[s] && !in_edges[s] && !is_author[s]) r.seeds_unknown.push_back(bundle.users.name(s));
    }

    std::vector<std::string_view> ids;
    ids.reserve(events.size());
    for (const auto& e : events) {
        ids.push_back(e.id);
        if (e.kind == EventKind::Original) ++r.originals;
        else ++r.retweets;
        if (e.original_author && !is_author[*e.original_author]) ++r.dangling_retweets;
        const bool scored = std::any_of(e.domains.begin(), e.domains.end(),
                                        [&](const std::string& d) { return bundle.scores.contains(d); });
        if (scored) ++r.events_with_scored_domain;
    }
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 1; i < ids.size(); ++i)
        if (ids[i] == ids[i - 1] && (r.duplicate_tweet_ids.empty() || r.duplicate_tweet_ids.back() != ids[i]))
            r.duplicate_tweet_ids.emplace_back(ids[i]);

    r.events = events.size();
    r.scored_event_fraction = events.empty() ? 0.0 : double(r.events_with_scored_domain) / double(events.size());
    r.edges = bundle.edges.edges.size();
    r.self_loops = bundle.edges.self_loops;
    r.duplicate_edges = bundle.edges.duplicates;
    r.dropped_urls = bundle.log.dropped_urls;
    r.users = n_users;
    r.seeds = bundle.seeds.size();
    r.scored_domains = bundle.scores.size();
    return r;
}

}  // namespace echoscope
