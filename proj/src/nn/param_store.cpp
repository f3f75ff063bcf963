#include "gnp/nn/param_store.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace gnp::nn {

namespace {
constexpr char kMagic[8] = {'G', 'N', 'P', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw DataError("checkpoint truncated");
    return v;
}

void write_tensor(std::ostream& out, const Tensor& t) {
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(t.shape.size()));
    for (int d : t.shape) write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(sizeof(double)) * t.size());
}

Tensor read_tensor(std::istream& in) {
    auto ndim = read_raw<std::uint32_t>(in);
    if (ndim > 8) throw DataError("checkpoint tensor rank too large");
    std::vector<int> shape;
    for (std::uint32_t i = 0; i < ndim; ++i) shape.push_back(static_cast<int>(read_raw<std::uint32_t>(in)));
    Tensor t = Tensor::zeros(shape);
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(sizeof(double)) * t.size());
    if (!in) throw DataError("checkpoint truncated");
    return t;
}
}  // namespace

Tensor& ParamStore::create(const std::string& name, std::vector<int> shape) {
    if (entries_.count(name)) throw ConfigError("parameter already exists: " + name);
    Entry e;
    e.value = Tensor::zeros(shape);
    e.grad = Tensor::zeros(shape);
    e.m1 = Tensor::zeros(shape);
    e.m2 = Tensor::zeros(shape);
    order_.push_back(name);
    auto [it, ok] = entries_.emplace(name, std::move(e));
    (void)ok;
    return it->second.value;
}

void ParamStore::init_uniform(const std::string& name, std::vector<int> shape, double bound,
                              std::mt19937_64& rng) {
    Tensor& t = create(name, std::move(shape));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (int i = 0; i < t.size(); ++i) t.data(i) = dist(rng);
}

void ParamStore::init_fan_in(const std::string& name, std::vector<int> shape, int fan_in,
                             std::mt19937_64& rng) {
    init_uniform(name, std::move(shape), 1.0 / std::sqrt(static_cast<double>(fan_in)), rng);
}

ParamStore::Entry& ParamStore::entry(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ConfigError("unknown parameter: " + name);
    return it->second;
}

const ParamStore::Entry& ParamStore::entry(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ConfigError("unknown parameter: " + name);
    return it->second;
}

bool ParamStore::has(const std::string& name) const { return entries_.count(name) > 0; }
Tensor& ParamStore::value(const std::string& name) { return entry(name).value; }
const Tensor& ParamStore::value(const std::string& name) const { return entry(name).value; }
Tensor& ParamStore::grad(const std::string& name) { return entry(name).grad; }
const Tensor& ParamStore::grad(const std::string& name) const { return entry(name).grad; }
Tensor& ParamStore::moment1(const std::string& name) { return entry(name).m1; }
Tensor& ParamStore::moment2(const std::string& name) { return entry(name).m2; }

void ParamStore::zero_grads() {
    for (auto& [_, e] : entries_) e.grad.data.setZero();
}

void ParamStore::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out.write(kMagic, sizeof(kMagic));
    write_raw<std::uint32_t>(out, kVersion);
    write_raw<std::int64_t>(out, step_);
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(order_.size()));
    for (const auto& name : order_) {
        const Entry& e = entry(name);
        write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_tensor(out, e.value);
        write_tensor(out, e.m1);
        write_tensor(out, e.m2);
    }
    if (!out) throw DataError("write failed: " + path);
}

ParamStore ParamStore::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw DataError("not a checkpoint file: " + path);
    auto version = read_raw<std::uint32_t>(in);
    if (version != kVersion)
        throw DataError("unsupported checkpoint version " + std::to_string(version));
    ParamStore ps;
    ps.step_ = read_raw<std::int64_t>(in);
    auto count = read_raw<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < count; ++i) {
        auto len = read_raw<std::uint32_t>(in);
        std::string name(len, '\0');
        in.read(name.data(), len);
        if (!in) throw DataError("checkpoint truncated");
        Entry e;
        e.value = read_tensor(in);
        e.m1 = read_tensor(in);
        e.m2 = read_tensor(in);
        e.grad = Tensor::zeros(e.value.shape);
        ps.order_.push_back(name);
        ps.entries_.emplace(name, std::move(e));
    }
    return ps;
}

bool ParamStore::operator==(const ParamStore& other) const {
    if (order_ != other.order_ || step_ != other.step_) return false;
    for (const auto& name : order_) {
        const Entry& a = entry(name);
        const Entry& b = other.entry(name);
        if (a.value.shape != b.value.shape) return false;
        if (std::memcmp(a.value.data.data(), b.value.data.data(),
                        sizeof(double) * static_cast<std::size_t>(a.value.size())) != 0)
            return false;
        if (std::memcmp(a.m1.data.data(), b.m1.data.data(),
                        sizeof(double) * static_cast<std::size_t>(a.m1.size())) != 0)
            return false;
        if (std::memcmp(a.m2.data.data(), b.m2.data.data(),
                        sizeof(double) * static_cast<std::size_t>(a.m2.size())) != 0)
            return false;
    }
    return true;
}

}  // namespace gnp::nn
