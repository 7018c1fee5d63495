#include "hoclust/io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hoclust {

namespace {

constexpr char kMagic[4] = {'T', 'E', 'N', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw io_error("truncated tensor file");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw io_error("truncated tensor file");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void write_tensor(const DenseTensor& T, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path);
    os.write(kMagic, 4);
    put_u32(os, std::uint32_t(T.order()));
    for (int n : T.dims) put_u32(os, std::uint32_t(n));
    for (double x : T.data) put_f64(os, x);
    if (!os) throw io_error("write failed: " + path);
}

DenseTensor read_tensor(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0) throw io_error("not a TEN1 file: " + path);
    const std::uint32_t d = get_u32(is);
    if (d < 1 || d > 16) throw io_error("implausible tensor order");
    std::vector<int> dims(d);
    std::int64_t total = 1;
    for (auto& n : dims) {
        n = int(get_u32(is));
        if (n < 1) throw io_error("bad dimension");
        total *= n;
    }
    std::vector<double> data(static_cast<std::size_t>(total));
    for (auto& x : data) x = get_f64(is);
    return DenseTensor(std::move(dims), std::move(data));
}

std::string tensor_to_json(const DenseTensor& T) {
    nlohmann::json j;
    j["dims"] = T.dims;
    j["data"] = T.data;
    return j.dump();
}

DenseTensor tensor_from_json(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    return DenseTensor(j.at("dims").get<std::vector<int>>(),
                       j.at("data").get<std::vector<double>>());
}

std::string hypergraph_to_json(const Hypergraph& G) {
    nlohmann::json j;
    j["d"] = G.d;
    j["N"] = G.N;
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : G.edges) {
        nlohmann::json t = nlohmann::json::array();
        for (int v : e) t.push_back(v + 1);
        edges.push_back(std::move(t));
    }
    j["edges"] = std::move(edges);
    if (G.planted) {
        nlohmann::json p;
        nlohmann::json verts = nlohmann::json::array();
        for (int v : G.planted->vertices) verts.push_back(v + 1);
        p["vertices"] = std::move(verts);
        p["q1"] = G.planted->q1;
        p["q2"] = G.planted->q2;
        j["planted"] = std::move(p);
    } else {
        j["planted"] = nullptr;
    }
    return j.dump();
}

Hypergraph hypergraph_from_json(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    Hypergraph G;
    G.d = j.at("d").get<int>();
    G.N = j.at("N").get<int>();
    for (const auto& e : j.at("edges")) {
        std::vector<int> t;
        for (const auto& v : e) t.push_back(v.get<int>() - 1);
        std::sort(t.begin(), t.end());
        G.edges.push_back(std::move(t));
    }
    std::sort(G.edges.begin(), G.edges.end());
    G.edges.erase(std::unique(G.edges.begin(), G.edges.end()), G.edges.end());
    if (j.contains("planted") && !j.at("planted").is_null()) {
        PlantedMeta p;
        for (const auto& v : j.at("planted").at("vertices")) p.vertices.push_back(v.get<int>() - 1);
        std::sort(p.vertices.begin(), p.vertices.end());
        p.q1 = j.at("planted").value("q1", 1.0);
        p.q2 = j.at("planted").value("q2", 0.5);
        G.planted = std::move(p);
    }
    return G;
}

void write_hypergraph(const Hypergraph& G, const std::string& path) {
    write_file(path, hypergraph_to_json(G));
}

Hypergraph read_hypergraph(const std::string& path) { return hypergraph_from_json(read_file(path)); }

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path);
    os << contents;
    if (!os) throw io_error("write failed: " + path);
}

}  // namespace hoclust
