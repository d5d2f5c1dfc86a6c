#include "flowgru/model_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "flowgru/errors.hpp"

namespace flowgru {

namespace {

constexpr char kMagic[4] = {'F', 'G', 'M', '1'};
constexpr std::uint32_t kVersion = 1;

// Explicit little-endian writers so the file layout does not depend on the
// host byte order.
void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) {
    static_assert(sizeof(float) == 4);
    put_u32(out, std::bit_cast<std::uint32_t>(v));
}

void put_f64(std::string& out, double v) {
    static_assert(sizeof(double) == 8);
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

void put_str(std::string& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.append(s);
}

struct Reader {
    std::string bytes;
    std::size_t pos = 0;
    std::string path;

    void need(std::size_t n) const {
        if (pos + n > bytes.size()) {
            throw DataError("model file '" + path + "' is truncated");
        }
    }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(bytes[pos++]);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes[pos++])) << (8 * i);
        }
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes[pos++])) << (8 * i);
        }
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const std::uint32_t n = u32();
        need(n);
        std::string s = bytes.substr(pos, n);
        pos += n;
        return s;
    }
};

}  // namespace

void save_model(const std::string& path, const ModelSpec& spec, const ModelParams& params,
                const std::vector<std::string>& class_names,
                const std::vector<std::string>& feature_names) {
    spec.validate();
    std::string out;
    out.append(kMagic, 4);
    put_u32(out, kVersion);

    put_u32(out, static_cast<std::uint32_t>(spec.input_len));
    put_u32(out, static_cast<std::uint32_t>(spec.conv_filters));
    put_u32(out, static_cast<std::uint32_t>(spec.conv_kernel));
    put_u32(out, static_cast<std::uint32_t>(spec.pool_size));
    put_u32(out, static_cast<std::uint32_t>(spec.gru_units));
    put_u32(out, static_cast<std::uint32_t>(spec.dense_units));
    put_u8(out, spec.head == HeadKind::Dense ? 0 : 1);
    put_u8(out, spec.output == OutputKind::Softmax ? 0 : 1);
    put_u32(out, static_cast<std::uint32_t>(spec.n_classes));
    put_str(out, activation_name(spec.hidden_activation));
    put_f64(out, spec.hidden_activation.alpha);

    put_u32(out, static_cast<std::uint32_t>(class_names.size()));
    for (const auto& s : class_names) put_str(out, s);
    put_u32(out, static_cast<std::uint32_t>(feature_names.size()));
    for (const auto& s : feature_names) put_str(out, s);

    const auto tensors = params.tensors();
    put_u32(out, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& [name, t] : tensors) {
        put_str(out, name);
        put_u32(out, static_cast<std::uint32_t>(t->ndim()));
        for (std::size_t d : t->shape) put_u32(out, static_cast<std::uint32_t>(d));
        for (double v : t->data) put_f32(out, static_cast<float>(v));
    }

    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path + "' for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw DataError("failed writing '" + path + "'");
}

LoadedModel load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open model file '" + path + "'");
    Reader r;
    r.path = path;
    r.bytes.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());

    r.need(4);
    if (std::memcmp(r.bytes.data(), kMagic, 4) != 0) {
        throw DataError("'" + path + "' is not a model file (bad magic)");
    }
    r.pos = 4;
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw DataError("model file '" + path + "' has unsupported version " +
                        std::to_string(version));
    }

    LoadedModel m;
    m.spec.input_len = r.u32();
    m.spec.conv_filters = r.u32();
    m.spec.conv_kernel = r.u32();
    m.spec.pool_size = r.u32();
    m.spec.gru_units = r.u32();
    m.spec.dense_units = r.u32();
    m.spec.head = r.u8() == 0 ? HeadKind::Dense : HeadKind::GlobalAveragePool;
    m.spec.output = r.u8() == 0 ? OutputKind::Softmax : OutputKind::Sigmoid;
    m.spec.n_classes = r.u32();
    const std::string act_name = r.str();
    const double act_alpha = r.f64();
    m.spec.hidden_activation = activation_from_name(act_name);
    if (m.spec.hidden_activation.has_alpha()) m.spec.hidden_activation.alpha = act_alpha;
    m.spec.validate();

    const std::uint32_t n_classes = r.u32();
    for (std::uint32_t i = 0; i < n_classes; ++i) m.class_names.push_back(r.str());
    if (m.class_names.size() != m.spec.n_classes) {
        throw DataError("model file '" + path + "' names " +
                        std::to_string(m.class_names.size()) + " classes but declares " +
                        std::to_string(m.spec.n_classes));
    }
    const std::uint32_t n_features = r.u32();
    for (std::uint32_t i = 0; i < n_features; ++i) m.feature_names.push_back(r.str());
    if (m.feature_names.size() != m.spec.input_len) {
        throw DataError("model file '" + path + "' names " +
                        std::to_string(m.feature_names.size()) +
                        " features but declares input length " +
                        std::to_string(m.spec.input_len));
    }

    m.params = ModelParams::zeros(m.spec);
    auto tensors = m.params.tensors();
    const std::uint32_t n_tensors = r.u32();
    if (n_tensors != tensors.size()) {
        throw DataError("model file '" + path + "' has " + std::to_string(n_tensors) +
                        " tensors, expected " + std::to_string(tensors.size()));
    }
    for (auto& [name, t] : tensors) {
        const std::string got = r.str();
        if (got != name) {
            throw DataError("model file '" + path + "': expected tensor '" + name +
                            "', found '" + got + "'");
        }
        const std::uint32_t ndim = r.u32();
        if (ndim != t->ndim()) {
            throw DataError("model file '" + path + "': tensor '" + name +
                            "' has the wrong rank");
        }
        for (std::size_t d = 0; d < ndim; ++d) {
            if (r.u32() != t->shape[d]) {
                throw DataError("model file '" + path + "': tensor '" + name +
                                "' has the wrong shape");
            }
        }
        for (std::size_t i = 0; i < t->numel(); ++i) {
            (*t)[i] = static_cast<double>(r.f32());
        }
    }
    if (r.pos != r.bytes.size()) {
        throw DataError("model file '" + path + "' has trailing bytes");
    }
    return m;
}

}  // namespace flowgru
