#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "echoscope/common.hpp"
#include "echoscope/pld.hpp"

namespace echoscope {

/// Interns user names into dense ids. Ids follow first-seen order.
class UserRegistry {
public:
    UserRegistry() = default;
    UserRegistry(const UserRegistry& other);
    UserRegistry& operator=(const UserRegistry& other);
    UserRegistry(UserRegistry&&) noexcept = default;
    UserRegistry& operator=(UserRegistry&&) noexcept = default;

    UserId intern(std::string_view name);
    std::optional<UserId> find(std::string_view name) const;
    const std::string& name(UserId id) const { return names_[id]; }
    std::size_t size() const { return names_.size(); }

private:
    std::deque<std::string> names_;
    std::unordered_map<std::string_view, UserId> index_;
};

/// Ideology score per pay-level domain, each in [0, 1].
using DomainScoreTable = std::map<std::string, double, std::less<>>;

/// Score for a label ("left", "left-center", "center", "least-biased",
/// "right-center", "right") or a decimal in [0, 1].
std::optional<double> score_from_label(std::string_view text);

struct FollowEdgeList {
    /// Sorted, deduplicated follower -> friend pairs.
    std::vector<std::pair<UserId, UserId>> edges;
    std::size_t self_loops = 0;
    std::size_t duplicates = 0;
};

enum class EventKind { Original, Retweet };

struct TweetEvent {
    std::string id;
    UserId author = kNoUser;
    std::int64_t timestamp = 0;
    EventKind kind = EventKind::Original;
    std::optional<UserId> original_author;
    std::vector<std::string> domains;

    bool operator==(const TweetEvent&) const = default;
};

/// Events ordered by (timestamp, id) with a per-author position index.
class EventLog {
public:
    EventLog() = default;
    /// Sorts the events and builds the author index.
    EventLog(std::vector<TweetEvent> events, std::size_t user_count);

    const std::vector<TweetEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }
    /// Positions in events() authored by `user`, ascending.
    std::span<const std::uint32_t> positions_of(UserId user) const;

    std::size_t dropped_urls = 0;
    std::size_t total_urls = 0;

private:
    std::vector<TweetEvent> events_;
    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> positions_;
};

struct DatasetBundle {
    UserRegistry users;
    DomainScoreTable scores;
    FollowEdgeList edges;
    EventLog log;
    /// Sorted unique seed ids.
    std::vector<UserId> seeds;
};

struct DatasetPaths {
    std::filesystem::path scores;
    std::filesystem::path edges;
    std::filesystem::path events;
    /// Optional: one user name per line. Defaults to every follower in the edge list.
    std::optional<std::filesystem::path> seeds;
};

DomainScoreTable parse_domain_scores(const std::filesystem::path& path);
DomainScoreTable parse_domain_scores(std::istream& in, const std::string& source = "<stream>");

FollowEdgeList parse_follow_edges(const std::filesystem::path& path, UserRegistry& users);
FollowEdgeList parse_follow_edges(std::istream& in, UserRegistry& users,
                                  const std::string& source = "<stream>");

EventLog parse_events(const std::filesystem::path& path, UserRegistry& users,
                      const PldExtractor& extractor = PldExtractor());
EventLog parse_events(std::istream& in, UserRegistry& users,
                      const PldExtractor& extractor = PldExtractor(),
                      const std::string& source = "<stream>");

std::vector<UserId> parse_seeds(const std::filesystem::path& path, UserRegistry& users);

/// Parses all inputs. Edges are read before events so ids are stable
/// for a given set of files.
DatasetBundle load_dataset(const DatasetPaths& paths);

void write_domain_scores(std::ostream& out, const DomainScoreTable& table);
void write_follow_edges(std::ostream& out, const FollowEdgeList& edges, const UserRegistry& users);
void write_events(std::ostream& out, const EventLog& log, const UserRegistry& users);
void write_seeds(std::ostream& out, std::span<const UserId> seeds, const UserRegistry& users);

struct ValidationReport {
    std::vector<std::string> seeds_without_friends;
    std::vector<std::string> seeds_unknown;
    std::size_t dangling_retweets = 0;
    std::vector<std::string> duplicate_tweet_ids;
    std::size_t events = 0;
    std::size_t originals = 0;
    std::size_t retweets = 0;
    std::size_t events_with_scored_domain = 0;
    double scored_event_fraction = 0.0;
    std::size_t edges = 0;
    std::size_t self_loops = 0;
    std::size_t duplicate_edges = 0;
    std::size_t dropped_urls = 0;
    std::size_t users = 0;
    std::size_t seeds = 0;
    std::size_t scored_domains = 0;

    /// Referential errors; warnings (dangling retweets, friendless seeds)
    /// are not counted.
    std::size_t error_count() const { return duplicate_tweet_ids.size(); }
    std::size_t warning_count() const {
        return seeds_without_friends.size() + seeds_unknown.size() + dangling_retweets + self_loops;
    }
    nlohmann::ordered_json to_json() const;
};

ValidationReport validate_dataset(const DatasetBundle& bundle);

}  // namespace echoscope
