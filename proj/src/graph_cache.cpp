#include "echoscope/graph_cache.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "echoscope/log.hpp"

namespace echoscope {

struct GraphCacheAccess {
    static auto& seeds(FollowerGraph& g) { return g.seeds_; }
    static auto& offsets(FollowerGraph& g) { return g.offsets_; }
    static auto& targets(FollowerGraph& g) { return g.targets_; }
    static auto& indegree(FollowerGraph& g) { return g.indegree_; }
    static auto& seeds(RetweetGraph& g) { return g.seeds_; }
    static auto& offsets(RetweetGraph& g) { return g.offsets_; }
    static auto& edges(RetweetGraph& g) { return g.edges_; }
    static auto& indegree(RetweetGraph& g) { return g.indegree_; }
};

namespace {

constexpr std::array<char, 8> kMagic{'E', 'C', 'H', 'O', 'G', 'R', 'P', 'H'};

class Writer {
public:
    explicit Writer(std::ofstream& out) : out_(out) {}

    void u32(std::uint32_t v) {
        char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out_.write(b, 4);
    }
    void u64(std::uint64_t v) {
        char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out_.write(b, 8);
    }
    void array(const std::vector<std::uint32_t>& v) {
        u64(v.size());
        for (auto x : v) u32(x);
    }
    void array(const std::vector<std::uint64_t>& v) {
        u64(v.size());
        for (auto x : v) u64(x);
    }

private:
    std::ofstream& out_;
};

class Reader {
public:
    explicit Reader(std::ifstream& in) : in_(in) {}

    bool ok() const { return static_cast<bool>(in_); }

    std::uint32_t u32() {
        unsigned char b[4] = {};
        in_.read(reinterpret_cast<char*>(b), 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        unsigned char b[8] = {};
        in_.read(reinterpret_cast<char*>(b), 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
        return v;
    }
    /// Guards element counts against truncated or hostile files.
    std::uint64_t count(std::uint64_t elem_size) {
        const auto n = u64();
        if (!ok() || n > remaining_ / std::max<std::uint64_t>(elem_size, 1)) {
            in_.setstate(std::ios::failbit);
            return 0;
        }
        return n;
    }
    void array(std::vector<std::uint32_t>& v) {
        v.resize(count(4));
        for (auto& x : v) x = u32();
    }
    void array(std::vector<std::uint64_t>& v) {
        v.resize(count(8));
        for (auto& x : v) x = u64();
    }
    void set_remaining(std::uint64_t n) { remaining_ = n; }

private:
    std::ifstream& in_;
    std::uint64_t remaining_ = 0;
};

}  // namespace

std::uint64_t fingerprint_files(const std::vector<std::filesystem::path>& files) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](unsigned char c) {
        h ^= c;
        h *= 0x100000001b3ULL;
    };
    std::vector<char> buf(1 << 16);
    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw InputError("cannot open " + path.string());
        while (in) {
            in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
            const auto got = in.gcount();
            for (std::streamsize i = 0; i < got; ++i) mix(static_cast<unsigned char>(buf[i]));
        }
        for (unsigned char c : {0xffu, 0x00u, 0xffu}) mix(c);
    }
    return h;
}

void save_graph_cache(const std::filesystem::path& path, const GraphCache& cache) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + tmp);
        Writer w(out);
        out.write(kMagic.data(), kMagic.size());
        w.u32(kGraphCacheVersion);
        w.u64(cache.fingerprint);
        w.u64(cache.users.size());
        for (std::size_t i = 0; i < cache.users.size(); ++i) {
            const auto& n = cache.users.name(static_cast<UserId>(i));
            w.u32(static_cast<std::uint32_t>(n.size()));
            out.write(n.data(), static_cast<std::streamsize>(n.size()));
        }
        auto fg = cache.follower;
        w.array(GraphCacheAccess::seeds(fg));
        w.array(GraphCacheAccess::offsets(fg));
        w.array(GraphCacheAccess::targets(fg));
        w.array(GraphCacheAccess::indegree(fg));
        auto rg = cache.retweet;
        w.array(GraphCacheAccess::seeds(rg));
        w.array(GraphCacheAccess::offsets(rg));
        const auto& edges = GraphCacheAccess::edges(rg);
        w.u64(edges.size());
        for (const auto& e : edges) {
            w.u32(e.target);
            w.u32(e.count);
        }
        w.array(GraphCacheAccess::indegree(rg));
        if (!out) throw InputError("failed writing " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::optional<GraphCache> load_graph_cache(const std::filesystem::path& path, std::uint64_t expected_fingerprint) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec) return std::nullopt;
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    Reader r(in);
    r.set_remaining(size);

    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) return std::nullopt;
    if (r.u32() != kGraphCacheVersion) return std::nullopt;
    GraphCache cache;
    cache.fingerprint = r.u64();
    if (!r.ok() || cache.fingerprint != expected_fingerprint) return std::nullopt;

    const auto n_users = r.count(4);
    std::string name;
    for (std::uint64_t i = 0; i < n_users && r.ok(); ++i) {
        const auto len = r.u32();
        if (len > size) return std::nullopt;
        name.resize(len);
        in.read(name.data(), len);
        cache.users.intern(name);
    }
    if (!r.ok() || cache.users.size() != n_users) return std::nullopt;

    auto& fg = cache.follower;
    r.array(GraphCacheAccess::seeds(fg));
    r.array(GraphCacheAccess::offsets(fg));
    r.array(GraphCacheAccess::targets(fg));
    r.array(GraphCacheAccess::indegree(fg));
    auto& rg = cache.retweet;
    r.array(GraphCacheAccess::seeds(rg));
    r.array(GraphCacheAccess::offsets(rg));
    auto& edges = GraphCacheAccess::edges(rg);
    edges.resize(r.count(8));
    for (auto& e : edges) {
        e.target = r.u32();
        e.count = r.u32();
    }
    r.array(GraphCacheAccess::indegree(rg));
    if (!r.ok()) {
        spdlog::warn("graph cache {} is truncated; rebuilding", path.string());
        return std::nullopt;
    }
    // Structural checks so a corrupt file cannot index out of range.
    const auto& fo = GraphCacheAccess::offsets(fg);
    const auto& ro = GraphCacheAccess::offsets(rg);
    if (fo.empty() || fo.back() != GraphCacheAccess::targets(fg).size() || ro.empty() ||
        ro.back() != edges.size())
        return std::nullopt;
    for (auto t : GraphCacheAccess::targets(fg))
        if (t >= n_users) return std::nullopt;
    for (const auto& e : edges)
        if (e.target >= n_users) return std::nullopt;
    return cache;
}

}  // namespace echoscope
