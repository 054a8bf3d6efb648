#include "llchess/nn/weights_io.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace llchess::nn {
namespace {

constexpr char kMagic[8] = {'L', 'L', 'C', 'W', 'N', 'E', 'T', '1'};

static_assert(std::endian::native == std::endian::little, "weight files assume a little-endian host");

template <class V>
void put(std::string& out, V value) {
    char buf[sizeof(V)];
    std::memcpy(buf, &value, sizeof(V));
    out.append(buf, sizeof(V));
}

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    template <class V>
    V get() {
        need(sizeof(V));
        V v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof(V));
        pos_ += sizeof(V);
        return v;
    }
    void get_floats(float* dst, std::size_t n) {
        need(n * sizeof(float));
        std::memcpy(dst, bytes_.data() + pos_, n * sizeof(float));
        pos_ += n * sizeof(float);
    }
    std::size_t pos() const { return pos_; }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw WeightFileError("weight file truncated");
    }
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

std::uint32_t crc(std::string_view bytes) {
    return static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

}  // namespace

std::string serialize_params(const NetworkParams<float>& net) {
    net.validate();
    std::string out(kMagic, sizeof kMagic);
    put<std::uint32_t>(out, kWeightFormatVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(net.layers.size()));
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const auto& l = net.layers[i];
        put<std::uint32_t>(out, static_cast<std::uint32_t>(l.inputs()));
        put<std::uint32_t>(out, static_cast<std::uint32_t>(l.outputs()));
        put<std::uint8_t>(out, static_cast<std::uint8_t>(l.activation));
        put<float>(out, i < net.dropout.size() ? static_cast<float>(net.dropout[i]) : 0.0f);
        out.append(reinterpret_cast<const char*>(l.weights.data()), static_cast<std::size_t>(l.weights.size()) * 4);
        out.append(reinterpret_cast<const char*>(l.bias.data()), static_cast<std::size_t>(l.bias.size()) * 4);
    }
    put<std::uint32_t>(out, crc(out));
    return out;
}

NetworkParams<float> deserialize_params(const std::string& bytes) {
    if (bytes.size() < sizeof kMagic + 12 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
        throw WeightFileError("not a weight file (bad magic)");
    const std::string_view body(bytes.data(), bytes.size() - 4);
    std::uint32_t stored_crc;
    std::memcpy(&stored_crc, bytes.data() + bytes.size() - 4, 4);

    Reader r(body);
    r.get<std::uint64_t>();  // magic
    const auto version = r.get<std::uint32_t>();
    if (version != kWeightFormatVersion)
        throw WeightFileError("unsupported weight file version " + std::to_string(version));
    if (stored_crc != crc(body)) throw WeightFileError("weight file checksum mismatch (corrupt or truncated)");

    NetworkParams<float> net;
    const auto count = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto in = r.get<std::uint32_t>();
        const auto out = r.get<std::uint32_t>();
        const auto tag = r.get<std::uint8_t>();
        const auto rate = r.get<float>();
        if (tag > static_cast<std::uint8_t>(Activation::Linear)) throw WeightFileError("unknown activation tag");
        if (static_cast<std::uint64_t>(in) * out > (1ULL << 28)) throw WeightFileError("implausible layer size");
        DenseLayer<float> layer{Matrix<float>(in, out), RowVector<float>(out), static_cast<Activation>(tag)};
        r.get_floats(layer.weights.data(), static_cast<std::size_t>(in) * out);
        r.get_floats(layer.bias.data(), out);
        net.layers.push_back(std::move(layer));
        if (i + 1 < count) net.dropout.push_back(static_cast<double>(rate));
    }
    if (r.pos() != body.size()) throw WeightFileError("trailing bytes in weight file");
    try {
        net.validate();
    } catch (const std::invalid_argument& e) {
        throw WeightFileError(std::string("invalid network in weight file: ") + e.what());
    }
    return net;
}

void save_params(const NetworkParams<float>& net, const std::filesystem::path& path) {
    const std::string bytes = serialize_params(net);
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw WeightFileError("cannot write " + tmp);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw WeightFileError("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

NetworkParams<float> load_params(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw WeightFileError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_params(buf.str());
}

}  // namespace llchess::nn
