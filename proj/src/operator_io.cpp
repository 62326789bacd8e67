#include "modpolar/operator_io.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace modpolar {

namespace {

using nlohmann::json;

json complex_to_json(const Complex& z) {
    return json::array({z.real(), z.imag()});
}

Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ParseError("complex entries must be [re, im] number pairs");
    }
    return Complex(j[0].get<double>(), j[1].get<double>());
}

int int_field(const json& j, const char* name) {
    if (!j.contains(name) || !j[name].is_number_integer()) {
        throw ParseError(std::string("missing or non-integer field: ") + name);
    }
    return j[name].get<int>();
}

const json& array_field(const json& j, const char* name) {
    if (!j.contains(name) || !j[name].is_array()) {
        throw ParseError(std::string("missing or non-array field: ") + name);
    }
    return j[name];
}

std::string kind_name(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::WeightedShift: return "weighted_shift";
        case GeneratorKind::Normal: return "normal";
        case GeneratorKind::Unitary: return "unitary";
        case GeneratorKind::Positive: return "positive";
        case GeneratorKind::GenericDense: return "generic_dense";
        case GeneratorKind::JordanLike: return "jordan_like";
        case GeneratorKind::BlockAlgebraRandom: return "block_algebra_random";
    }
    throw ParseError("unhandled generator kind");
}

GeneratorKind kind_from_name(const std::string& name) {
    if (name == "weighted_shift") return GeneratorKind::WeightedShift;
    if (name == "normal") return GeneratorKind::Normal;
    if (name == "unitary") return GeneratorKind::Unitary;
    if (name == "positive") return GeneratorKind::Positive;
    if (name == "generic_dense") return GeneratorKind::GenericDense;
    if (name == "jordan_like") return GeneratorKind::JordanLike;
    if (name == "block_algebra_random") return GeneratorKind::BlockAlgebraRandom;
    throw ParseError("unknown generator kind: " + name);
}

} // namespace

AdjointableOp parse_operator(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("operator document must be an object");

    const json& algebra = array_field(doc, "algebra");
    std::vector<int> sizes;
    for (const json& n : algebra) {
        if (!n.is_number_integer() || n.get<int>() < 1) {
            throw ParseError("algebra block sizes must be positive integers");
        }
        sizes.push_back(n.get<int>());
    }
    const int k = int_field(doc, "domain_rank");
    const int m = int_field(doc, "codomain_rank");
    if (sizes.empty() || k < 1 || m < 1) {
        throw ParseError("algebra must be nonempty and ranks positive");
    }

    const json& entries = array_field(doc, "entries");
    if (static_cast<int>(entries.size()) != static_cast<int>(sizes.size())) {
        throw ParseError("entry array does not match the algebra summand count");
    }
    AlgebraShape shape(sizes);
    std::vector<Matrix> blocks;
    for (int i = 0; i < shape.summands(); ++i) {
        const int n = shape.block_size(i);
        const json& summand = entries[static_cast<std::size_t>(i)];
        if (!summand.is_array() || static_cast<int>(summand.size()) != m) {
            throw ParseError("summand entry array does not match the codomain rank");
        }
        Matrix block = Matrix::Zero(static_cast<Eigen::Index>(m) * n,
                                    static_cast<Eigen::Index>(k) * n);
        for (int p = 0; p < m; ++p) {
            const json& row = summand[static_cast<std::size_t>(p)];
            if (!row.is_array() || static_cast<int>(row.size()) != k) {
                throw ParseError("entry row does not match the domain rank");
            }
            for (int q = 0; q < k; ++q) {
                const json& cell = row[static_cast<std::size_t>(q)];
                if (!cell.is_array() || static_cast<int>(cell.size()) != n) {
                    throw ParseError("entry cell does not match the block size");
                }
                for (int r = 0; r < n; ++r) {
                    const json& cell_row = cell[static_cast<std::size_t>(r)];
                    if (!cell_row.is_array() ||
                        static_cast<int>(cell_row.size()) != n) {
                        throw ParseError("entry cell row does not match the block size");
                    }
                    for (int c = 0; c < n; ++c) {
                        block(p * n + r, q * n + c) =
                            complex_from_json(cell_row[static_cast<std::size_t>(c)]);
                    }
                }
            }
        }
        blocks.push_back(std::move(block));
    }
    try {
        return AdjointableOp(ModuleSpace(shape, k), ModuleSpace(shape, m),
                             std::move(blocks));
    } catch (const Error& e) {
        throw ParseError(std::string("inconsistent operator document: ") + e.what());
    }
}

std::string serialize_operator(const AdjointableOp& op) {
    json doc;
    doc["algebra"] = op.domain.shape.block_sizes();
    doc["domain_rank"] = op.domain.rank;
    doc["codomain_rank"] = op.codomain.rank;
    json entries = json::array();
    for (int i = 0; i < op.domain.shape.summands(); ++i) {
        const int n = op.domain.shape.block_size(i);
        const Matrix& block = op.blocks[static_cast<std::size_t>(i)];
        json summand = json::array();
        for (int p = 0; p < op.codomain.rank; ++p) {
            json row = json::array();
            for (int q = 0; q < op.domain.rank; ++q) {
                json cell = json::array();
                for (int r = 0; r < n; ++r) {
                    json cell_row = json::array();
                    for (int c = 0; c < n; ++c) {
                        cell_row.push_back(complex_to_json(block(p * n + r, q * n + c)));
                    }
                    cell.push_back(std::move(cell_row));
                }
                row.push_back(std::move(cell));
            }
            summand.push_back(std::move(row));
        }
        entries.push_back(std::move(summand));
    }
    doc["entries"] = std::move(entries);
    return doc.dump(2) + "\n";
}

AdjointableOp load_operator(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open input file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_operator(buffer.str());
}

void save_operator(const AdjointableOp& op, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open output file: " + path);
    out << serialize_operator(op);
}

GeneratorSpec parse_generator_spec(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
        throw ParseError("generator spec needs a string field: kind");
    }
    GeneratorSpec spec;
    spec.kind = kind_from_name(doc["kind"].get<std::string>());
    std::vector<int> sizes;
    for (const json& n : array_field(doc, "algebra")) {
        if (!n.is_number_integer() || n.get<int>() < 1) {
            throw ParseError("algebra block sizes must be positive integers");
        }
        sizes.push_back(n.get<int>());
    }
    if (sizes.empty()) throw ParseError("algebra must be nonempty");
    spec.shape = AlgebraShape(sizes);
    spec.domain_rank = int_field(doc, "domain_rank");
    spec.codomain_rank = int_field(doc, "codomain_rank");
    if (doc.contains("weights")) {
        for (const json& w : array_field(doc, "weights")) {
            if (!w.is_number()) throw ParseError("weights must be numbers");
            spec.weights.push_back(w.get<double>());
        }
    }
    if (doc.contains("eigenvalues")) {
        for (const json& z : array_field(doc, "eigenvalues")) {
            spec.eigenvalues.push_back(complex_from_json(z));
        }
    }
    if (doc.contains("diagonal")) {
        if (!doc["diagonal"].is_boolean()) throw ParseError("diagonal must be boolean");
        spec.diagonal = doc["diagonal"].get<bool>();
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
            throw ParseError("seed must be an integer");
        }
        spec.seed = doc["seed"].get<std::uint64_t>();
    }
    return spec;
}

std::string serialize_generator_spec(const GeneratorSpec& spec) {
    json doc;
    doc["kind"] = kind_name(spec.kind);
    doc["algebra"] = spec.shape.block_sizes();
    doc["domain_rank"] = spec.domain_rank;
    doc["codomain_rank"] = spec.codomain_rank;
    if (!spec.weights.empty()) doc["weights"] = spec.weights;
    if (!spec.eigenvalues.empty()) {
        json eigen = json::array();
        for (const Complex& z : spec.eigenvalues) eigen.push_back(complex_to_json(z));
        doc["eigenvalues"] = std::move(eigen);
    }
    if (spec.diagonal) doc["diagonal"] = true;
    doc["seed"] = spec.seed;
    return doc.dump(2) + "\n";
}

} // namespace modpolar
