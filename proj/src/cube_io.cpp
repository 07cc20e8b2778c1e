#include "tubal/cube_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>
#include <vector>

#include "tubal/errors.hpp"

namespace tubal::io {

namespace fs = std::filesystem;

namespace {

using Bytes = std::vector<unsigned char>;

void put_u32(Bytes& out, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(p[b]) << (8 * b);
    return v;
}

void put_value(Bytes& out, double v, Dtype dtype, Endian endian) {
    unsigned char buf[8];
    std::size_t n = 0;
    if (dtype == Dtype::f64) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>(bits >> (8 * b));
        n = 8;
    } else {
        const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
        for (int b = 0; b < 4; ++b) buf[b] = static_cast<unsigned char>(bits >> (8 * b));
        n = 4;
    }
    if (endian == Endian::big) std::reverse(buf, buf + n);
    out.insert(out.end(), buf, buf + n);
}

double get_value(const unsigned char* p, Dtype dtype, Endian endian) {
    const std::size_t n = dtype_size(dtype);
    unsigned char buf[8];
    std::memcpy(buf, p, n);
    if (endian == Endian::big) std::reverse(buf, buf + n);
    if (dtype == Dtype::f64) {
        std::uint64_t bits = 0;
        for (std::size_t b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
        return std::bit_cast<double>(bits);
    }
    std::uint32_t bits = 0;
    for (std::size_t b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(buf[b]) << (8 * b);
    return static_cast<double>(std::bit_cast<float>(bits));
}

Bytes read_all(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed for " + path.string());
    return data;
}

void write_atomic(const fs::path& path, const void* data, std::size_t size) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place at " + path.string());
    }
}

std::uint32_t narrow_dim(std::size_t n) {
    if (n > 0xffffffffULL) throw IoError("cube dimension exceeds 32 bits");
    return static_cast<std::uint32_t>(n);
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

Cube decode_payload(const unsigned char* p, const Dims& dims, const RawFormat& format,
                    const std::string& source) {
    Cube x(dims);
    const std::size_t width = dtype_size(format.dtype);
    for (std::size_t idx = 0; idx < dims.total(); ++idx) {
        const double v = get_value(p + idx * width, format.dtype, format.endian);
        if (!std::isfinite(v)) throw IoError("non-finite value in " + source);
        std::size_t dst = idx;
        if (format.layout == RawLayout::bip) {
            // file order: pixel (i, j) then band k
            const std::size_t k = idx % dims.n3;
            const std::size_t pixel = idx / dims.n3;
            dst = k * dims.slice_size() + pixel;
        }
        x.data()[dst] = v;
    }
    return x;
}

} // namespace

std::size_t dtype_size(Dtype d) {
    switch (d) {
    case Dtype::f32: return 4;
    case Dtype::f64: return 8;
    }
    throw BadDtype("unknown dtype code");
}

void write_cube(const fs::path& path, const Cube& x, Dtype dtype) {
    Bytes out;
    out.reserve(kHeaderBytes + x.size() * dtype_size(dtype));
    out.insert(out.end(), {'H', 'S', 'C', '1'});
    put_u32(out, narrow_dim(x.n1()));
    put_u32(out, narrow_dim(x.n2()));
    put_u32(out, narrow_dim(x.n3()));
    out.push_back(static_cast<unsigned char>(dtype));
    out.insert(out.end(), {0, 0, 0});
    for (const double v : x.data()) put_value(out, v, dtype, Endian::little);
    write_atomic(path, out.data(), out.size());
}

namespace {

CubeHeader parse_header(const Bytes& data, const std::string& source) {
    if (data.size() < 4) throw TruncatedFile(source + ": file shorter than the magic");
    if (std::memcmp(data.data(), "HSC1", 4) != 0) throw BadMagic(source + ": not an HSC1 file");
    if (data.size() < kHeaderBytes) throw TruncatedFile(source + ": header cut short");
    CubeHeader h;
    h.n1 = get_u32(data.data() + 4);
    h.n2 = get_u32(data.data() + 8);
    h.n3 = get_u32(data.data() + 12);
    const unsigned char code = data[16];
    if (code != 1 && code != 2) {
        throw BadDtype(source + ": dtype code " + std::to_string(code) + " is not 1 or 2");
    }
    h.dtype = static_cast<Dtype>(code);
    if (data[17] != 0 || data[18] != 0 || data[19] != 0) {
        throw IoError(source + ": reserved header bytes are not zero");
    }
    if (h.n1 == 0 || h.n2 == 0 || h.n3 == 0) throw IoError(source + ": zero dimension in header");
    return h;
}

} // namespace

CubeHeader read_header(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    Bytes head(kHeaderBytes);
    in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(kHeaderBytes));
    head.resize(static_cast<std::size_t>(in.gcount()));
    return parse_header(head, path.string());
}

Cube read_cube(const fs::path& path) {
    const Bytes data = read_all(path);
    const std::string source = path.string();
    const CubeHeader h = parse_header(data, source);
    const Dims dims{h.n1, h.n2, h.n3};
    const std::uint64_t expected =
        static_cast<std::uint64_t>(h.n1) * h.n2 * h.n3 * dtype_size(h.dtype);
    const std::uint64_t payload = data.size() - kHeaderBytes;
    if (payload < expected) {
        throw TruncatedFile(source + ": payload has " + std::to_string(payload) + " bytes, header promises " +
                            std::to_string(expected));
    }
    if (payload > expected) throw IoError(source + ": trailing bytes after payload");
    return decode_payload(data.data() + kHeaderBytes, dims, {RawLayout::bsq, h.dtype, Endian::little},
                          source);
}

RawLayout parse_layout(std::string_view name) {
    if (name == "bsq") return RawLayout::bsq;
    if (name == "bip") return RawLayout::bip;
    throw BadLayout("unknown raw layout '" + std::string(name) + "' (expected bsq or bip)");
}

Dtype parse_dtype(std::string_view name) {
    if (name == "f32" || name == "float32") return Dtype::f32;
    if (name == "f64" || name == "float64") return Dtype::f64;
    throw BadDtype("unknown dtype '" + std::string(name) + "' (expected f32 or f64)");
}

Endian parse_endian(std::string_view name) {
    if (name == "little" || name == "le") return Endian::little;
    if (name == "big" || name == "be") return Endian::big;
    throw InvalidArgument("unknown endianness '" + std::string(name) + "'");
}

Cube import_raw(const fs::path& path, const Dims& dims, const RawFormat& format) {
    if (dims.n1 == 0 || dims.n2 == 0 || dims.n3 == 0) {
        throw InvalidArgument("raw import needs positive dimensions");
    }
    const Bytes data = read_all(path);
    const std::uint64_t expected = static_cast<std::uint64_t>(dims.total()) * dtype_size(format.dtype);
    if (data.size() != expected) {
        throw SizeMismatch(path.string() + ": " + std::to_string(data.size()) + " bytes, expected " +
                           std::to_string(expected) + " for " + to_string(dims));
    }
    return decode_payload(data.data(), dims, format, path.string());
}

void export_raw(const fs::path& path, const Cube& x, const RawFormat& format) {
    Bytes out;
    out.reserve(x.size() * dtype_size(format.dtype));
    if (format.layout == RawLayout::bsq) {
        for (const double v : x.data()) put_value(out, v, format.dtype, format.endian);
    } else {
        for (std::size_t i = 0; i < x.n1(); ++i)
            for (std::size_t j = 0; j < x.n2(); ++j)
                for (std::size_t k = 0; k < x.n3(); ++k) put_value(out, x(i, j, k), format.dtype, format.endian);
    }
    write_atomic(path, out.data(), out.size());
}

void write_text(const fs::path& path, std::string_view text) {
    write_atomic(path, text.data(), text.size());
}

ConfigMap parse_config(std::string_view text) {
    ConfigMap cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(std::string_view(body).substr(0, eq));
        std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw InvalidArgument("config line " + std::to_string(lineno) + ": empty key");
        cfg[std::move(key)] = std::move(value);
    }
    return cfg;
}

ConfigMap read_config(const fs::path& path) {
    const Bytes data = read_all(path);
    return parse_config(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

namespace {

double to_real(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != v.size()) throw InvalidArgument("config key " + key + ": '" + v + "' is not a number");
    return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    std::uint64_t out = 0;
    try {
        if (!v.empty() && v[0] != '-') out = std::stoull(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != v.size()) {
        throw InvalidArgument("config key " + key + ": '" + v + "' is not a non-negative integer");
    }
    return out;
}

} // namespace

NoiseSpec noise_spec_from_config(const ConfigMap& cfg, NoiseSpec spec) {
    for (const auto& [key, value] : cfg) {
        const auto as_int = [&] { return static_cast<int>(to_unsigned(key, value)); };
        if (key == "gaussian_sigma") spec.gaussian_sigma = to_real(key, value);
        else if (key == "impulse_fraction") spec.impulse_fraction = to_real(key, value);
        else if (key == "stripe_bands") spec.stripe_bands = to_unsigned(key, value);
        else if (key == "stripe_width_min") spec.stripe_width_range.lo = as_int();
        else if (key == "stripe_width_max") spec.stripe_width_range.hi = as_int();
        else if (key == "deadline_bands") spec.deadline_bands = to_unsigned(key, value);
        else if (key == "deadline_width_min") spec.deadline_width_range.lo = as_int();
        else if (key == "deadline_width_max") spec.deadline_width_range.hi = as_int();
        else if (key == "groups_min") spec.groups_per_band.lo = as_int();
        else if (key == "groups_max") spec.groups_per_band.hi = as_int();
        else if (key == "stripe_amplitude_min") spec.stripe_amplitude.lo = to_real(key, value);
        else if (key == "stripe_amplitude_max") spec.stripe_amplitude.hi = to_real(key, value);
        else if (key == "seed") spec.seed = {to_unsigned(key, value)};
        else throw InvalidArgument("unknown noise config key '" + key + "'");
    }
    spec.validate();
    return spec;
}

std::string noise_spec_to_config(const NoiseSpec& spec) {
    // Shortest text that reads back to the same double.
    const auto real = [](double v) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    };
    std::ostringstream os;
    os << "gaussian_sigma = " << real(spec.gaussian_sigma) << '\n'
       << "impulse_fraction = " << real(spec.impulse_fraction) << '\n'
       << "stripe_bands = " << spec.stripe_bands << '\n'
       << "stripe_width_min = " << spec.stripe_width_range.lo << '\n'
       << "stripe_width_max = " << spec.stripe_width_range.hi << '\n'
       << "deadline_bands = " << spec.deadline_bands << '\n'
       << "deadline_width_min = " << spec.deadline_width_range.lo << '\n'
       << "deadline_width_max = " << spec.deadline_width_range.hi << '\n'
       << "groups_min = " << spec.groups_per_band.lo << '\n'
       << "groups_max = " << spec.groups_per_band.hi << '\n'
       << "stripe_amplitude_min = " << real(spec.stripe_amplitude.lo) << '\n'
       << "stripe_amplitude_max = " << real(spec.stripe_amplitude.hi) << '\n'
       << "seed = " << spec.seed.seed << '\n';
    return os.str();
}

} // namespace tubal::io
