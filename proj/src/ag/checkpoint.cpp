#include "ukp/ag/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace ukp::ag {

namespace {

constexpr char kMagic[4] = {'U', 'K', 'P', 'F'};

void write_u16(std::ostream& os, uint16_t v) { os.write(reinterpret_cast<const char*>(&v), 2); }
void write_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void write_u8(std::ostream& os, uint8_t v) { os.write(reinterpret_cast<const char*>(&v), 1); }

bool read_exact(std::istream& is, void* p, size_t n) {
    is.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n));
    return static_cast<size_t>(is.gcount()) == n;
}

}  // namespace

void save_records(const std::string& path, const NamedTensors& records) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp + " for writing");
        os.write(kMagic, 4);
        write_u32(os, kCheckpointVersion);
        for (const auto& [name, t] : records) {
            if (name.size() > 65535) throw IoError("record name too long: " + name);
            write_u16(os, static_cast<uint16_t>(name.size()));
            os.write(name.data(), static_cast<std::streamsize>(name.size()));
            write_u8(os, static_cast<uint8_t>(t.rank()));
            for (int64_t d : t.shape()) write_u32(os, static_cast<uint32_t>(d));
            os.write(reinterpret_cast<const char*>(t.data()),
                     static_cast<std::streamsize>(t.numel() * sizeof(float)));
        }
        if (!os) throw IoError("write failure on " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot rename " + tmp + " to " + path);
}

NamedTensors load_records(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    char magic[4];
    if (!read_exact(is, magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError(path + ": not a UKPF checkpoint (bad magic)");
    uint32_t version = 0;
    if (!read_exact(is, &version, 4)) throw IoError(path + ": truncated header");
    if (version != kCheckpointVersion)
        throw IoError(path + ": unsupported checkpoint version " + std::to_string(version) + " (expected " +
                      std::to_string(kCheckpointVersion) + ")");
    NamedTensors out;
    for (;;) {
        uint16_t name_len = 0;
        if (!read_exact(is, &name_len, 2)) break;  // clean EOF
        std::string name(name_len, '\0');
        if (!read_exact(is, name.data(), name_len)) throw IoError(path + ": truncated record name");
        uint8_t rank = 0;
        if (!read_exact(is, &rank, 1)) throw IoError(path + ": truncated record");
        Shape shape(rank);
        for (int i = 0; i < rank; ++i) {
            uint32_t d = 0;
            if (!read_exact(is, &d, 4)) throw IoError(path + ": truncated dims for " + name);
            shape[i] = d;
        }
        std::vector<float> data(static_cast<size_t>(shape_numel(shape)));
        if (!read_exact(is, data.data(), data.size() * sizeof(float)))
            throw IoError(path + ": truncated payload for " + name);
        out.emplace_back(name, Tensor::from_data(shape, std::move(data)));
    }
    return out;
}

void save_params(const std::string& path, const ParamSet& params) {
    NamedTensors recs;
    recs.reserve(params.size());
    for (size_t i = 0; i < params.size(); ++i) recs.emplace_back(params.name(i), params.tensor(i));
    save_records(path, recs);
}

void load_params(const std::string& path, ParamSet& params) {
    NamedTensors recs = load_records(path);
    size_t used = 0;
    for (auto& [name, t] : recs) {
        Tensor* dst = params.find(name);
        if (!dst) throw IoError(path + ": unknown parameter " + name);
        if (dst->shape() != t.shape())
            throw IoError(path + ": shape mismatch for " + name + ": file " + shape_str(t.shape()) +
                          " vs model " + shape_str(dst->shape()));
        std::memcpy(dst->data_mut(), t.data(), static_cast<size_t>(t.numel()) * sizeof(float));
        ++used;
    }
    if (used != params.size())
        throw IoError(path + ": checkpoint has " + std::to_string(used) + " of " + std::to_string(params.size()) +
                      " parameters");
}

void save_adam_state(const std::string& path, const Adam& opt, const ParamSet& params) {
    NamedTensors recs;
    recs.emplace_back("adam.t", Tensor::scalar(static_cast<float>(opt.step_count())));
    for (size_t i = 0; i < params.size(); ++i) {
        const Shape& s = params.tensor(i).shape();
        if (i < opt.m().size()) {
            recs.emplace_back(params.name(i) + ".m", Tensor::from_data(s, opt.m()[i]));
            recs.emplace_back(params.name(i) + ".v", Tensor::from_data(s, opt.v()[i]));
        }
    }
    save_records(path, recs);
}

void load_adam_state(const std::string& path, Adam& opt, const ParamSet& params) {
    NamedTensors recs = load_records(path);
    auto find = [&](const std::string& n) -> Tensor* {
        for (auto& [name, t] : recs)
            if (name == n) return &t;
        return nullptr;
    };
    Tensor* t_rec = find("adam.t");
    if (!t_rec) throw IoError(path + ": missing adam.t");
    std::vector<std::vector<float>> m(params.size()), v(params.size());
    for (size_t i = 0; i < params.size(); ++i) {
        Tensor* mi = find(params.name(i) + ".m");
        Tensor* vi = find(params.name(i) + ".v");
        if (!mi || !vi) throw IoError(path + ": missing moments for " + params.name(i));
        m[i] = mi->vec();
        v[i] = vi->vec();
    }
    opt.restore(std::move(m), std::move(v), static_cast<int64_t>(t_rec->item()));
}

}  // namespace ukp::ag
