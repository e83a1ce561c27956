#include "coherence/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "coherence/errors.hpp"
#include "coherence/sha256.hpp"

namespace coherence::io {

namespace {

using nlohmann::json;

[[noreturn]] void rethrow_with_position(const std::string& text, std::size_t byte,
                                        const std::string& what) {
    long line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    std::ostringstream os;
    os << "line " << line << " column " << col << ": " << what;
    throw parse_error(os.str(), line, col);
}

json parse_document(const std::string& path, std::string* text_out = nullptr) {
    const std::string text = read_file(path);
    if (text_out) *text_out = text;
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        rethrow_with_position(text, e.byte, e.what());
    } catch (const json::exception& e) {
        // Out-of-range numbers and friends are parse failures too.
        throw parse_error(std::string("while parsing ") + path + ": " + e.what());
    }
}

double finite_number(const json& j, const char* where) {
    if (!j.is_number()) throw parse_error(std::string(where) + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw parse_error(std::string(where) + ": non-finite number");
    return v;
}

cplx parse_complex(const json& j, const char* where) {
    if (!j.is_array() || j.size() != 2)
        throw parse_error(std::string(where) + ": expected an [re, im] pair");
    return {finite_number(j[0], where), finite_number(j[1], where)};
}

std::vector<std::size_t> parse_dims(const json& j) {
    if (!j.contains("dims") || !j["dims"].is_array() || j["dims"].empty())
        throw parse_error("state file: missing or empty \"dims\" array");
    std::vector<std::size_t> dims;
    for (const json& d : j["dims"]) {
        if (!d.is_number_unsigned() || d.get<std::size_t>() < 1)
            throw parse_error("state file: dims entries must be positive integers");
        dims.push_back(d.get<std::size_t>());
    }
    return dims;
}

ComplexMatrix parse_matrix(const json& j, std::size_t expected_side, const char* where) {
    if (!j.is_array() || j.size() != expected_side)
        throw parse_error(std::string(where) + ": expected " + std::to_string(expected_side) +
                          " matrix rows");
    ComplexMatrix m(expected_side, expected_side);
    for (std::size_t r = 0; r < expected_side; ++r) {
        const json& row = j[r];
        if (!row.is_array() || row.size() != expected_side)
            throw parse_error(std::string(where) + ": row " + std::to_string(r) +
                              " does not have " + std::to_string(expected_side) + " entries");
        for (std::size_t c = 0; c < expected_side; ++c) m(r, c) = parse_complex(row[c], where);
    }
    return m;
}

void append_complex(std::ostringstream& os, const cplx& z) {
    os << '[' << format_significant(z.real()) << ", " << format_significant(z.imag()) << ']';
}

void append_u64_le(std::string& bytes, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_double_le(std::string& bytes, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    append_u64_le(bytes, u);
}

} // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parse_error("cannot write file: " + path);
    out << text;
}

std::string format_significant(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

LoadedState load_state_file(const std::string& path) {
    const json doc = parse_document(path);
    if (!doc.is_object()) throw parse_error("state file: top level must be an object");
    const std::vector<std::size_t> dims = parse_dims(doc);
    const std::size_t d = total_dimension(dims);

    LoadedState out;
    if (doc.contains("matrix")) {
        out.density = DensityMatrix::make(dims, parse_matrix(doc["matrix"], d, "state file"));
    } else if (doc.contains("vector")) {
        const json& vec = doc["vector"];
        if (!vec.is_array() || vec.size() != d)
            throw parse_error("state file: \"vector\" must have " + std::to_string(d) +
                              " entries");
        std::vector<cplx> v(d);
        for (std::size_t i = 0; i < d; ++i) v[i] = parse_complex(vec[i], "state file");
        out.pure = PureState::make(dims, std::move(v));
    } else {
        throw parse_error("state file: need a \"matrix\" or \"vector\" field");
    }
    return out;
}

DensityMatrix as_density(const LoadedState& loaded) {
    if (loaded.density) return *loaded.density;
    return loaded.pure->density();
}

std::vector<ComplexMatrix> load_channel_file(const std::string& path) {
    const json doc = parse_document(path);
    if (!doc.is_object() || !doc.contains("kraus") || !doc["kraus"].is_array() ||
        doc["kraus"].empty())
        throw parse_error("channel file: need a non-empty \"kraus\" array");
    std::vector<ComplexMatrix> kraus;
    for (const json& k : doc["kraus"]) {
        if (!k.is_array() || k.empty()) throw parse_error("channel file: malformed operator");
        kraus.push_back(parse_matrix(k, k.size(), "channel file"));
    }
    return kraus;
}

std::vector<ProtocolStep> load_protocol_file(const std::string& path) {
    const json doc = parse_document(path);
    if (!doc.is_object() || !doc.contains("steps") || !doc["steps"].is_array())
        throw parse_error("protocol file: need a \"steps\" array");
    if (doc["steps"].size() > kProtocolDepthCap)
        throw parse_error("protocol file: more than 8 steps");
    std::vector<ProtocolStep> steps;
    for (const json& s : doc["steps"]) {
        if (!s.is_object() || !s.contains("party") || !s.contains("kraus"))
            throw parse_error("protocol file: each step needs \"party\" and \"kraus\"");
        const std::string party = s["party"].get<std::string>();
        if (party != "A" && party != "B")
            throw parse_error("protocol file: party must be \"A\" or \"B\"");
        ProtocolStep step;
        step.party = party[0];
        if (!s["kraus"].is_array() || s["kraus"].empty())
            throw parse_error("protocol file: step needs a non-empty \"kraus\" array");
        for (const json& k : s["kraus"]) {
            if (!k.is_array() || k.empty()) throw parse_error("protocol file: malformed operator");
            step.kraus.push_back(parse_matrix(k, k.size(), "protocol file"));
        }
        steps.push_back(std::move(step));
    }
    return steps;
}

std::string encode_density(const DensityMatrix& rho) {
    std::ostringstream os;
    os << "{\n  \"dims\": [";
    for (std::size_t k = 0; k < rho.dims().size(); ++k)
        os << (k ? ", " : "") << rho.dims()[k];
    os << "],\n  \"matrix\": [\n";
    for (std::size_t r = 0; r < rho.dim(); ++r) {
        os << "    [";
        for (std::size_t c = 0; c < rho.dim(); ++c) {
            if (c) os << ", ";
            append_complex(os, rho.mat()(r, c));
        }
        os << (r + 1 < rho.dim() ? "],\n" : "]\n");
    }
    os << "  ]\n}\n";
    return os.str();
}

std::string encode_pure(const PureState& psi) {
    std::ostringstream os;
    os << "{\n  \"dims\": [";
    for (std::size_t k = 0; k < psi.dims().size(); ++k)
        os << (k ? ", " : "") << psi.dims()[k];
    os << "],\n  \"vector\": [\n";
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        os << "    ";
        append_complex(os, psi.vec()[i]);
        os << (i + 1 < psi.dim() ? ",\n" : "\n");
    }
    os << "  ]\n}\n";
    return os.str();
}

std::string state_digest(const DensityMatrix& rho) {
    std::string bytes = "CDM1";
    append_u64_le(bytes, rho.dims().size());
    for (std::size_t d : rho.dims()) append_u64_le(bytes, d);
    for (const cplx& z : rho.mat().data()) {
        append_double_le(bytes, z.real());
        append_double_le(bytes, z.imag());
    }
    return sha256_hex(
        {reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()});
}

} // namespace coherence::io
