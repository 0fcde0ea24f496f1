#include <poscon/matrix_io.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace poscon {

namespace {

Complex entry_from_json(const Json& value) {
    if (value.is_number()) {
        return Complex(value.get<double>(), 0.0);
    }
    if (value.is_array() && (value.size() == 1 || value.size() == 2) &&
        value[0].is_number() && (value.size() == 1 || value[1].is_number())) {
        return Complex(value[0].get<double>(),
                       value.size() == 2 ? value[1].get<double>() : 0.0);
    }
    throw ParseError("matrix entry must be a number or an [re, im] pair");
}

}  // namespace

ComplexMatrix matrix_from_json(const Json& doc) {
    if (!doc.is_object() || !doc.contains("rows") || !doc.contains("cols") ||
        !doc.contains("entries")) {
        throw ParseError("matrix document needs rows, cols and entries");
    }
    if (!doc["rows"].is_number_integer() || !doc["cols"].is_number_integer()) {
        throw ParseError("rows/cols must be integers");
    }
    const Index rows = doc["rows"].get<Index>();
    const Index cols = doc["cols"].get<Index>();
    if (rows < 0 || cols < 0) {
        throw ParseError("rows/cols must be nonnegative");
    }
    const Json& entries = doc["entries"];
    if (!entries.is_array() || static_cast<Index>(entries.size()) != rows * cols) {
        throw DimensionMismatch("entry count does not equal rows * cols");
    }
    ComplexMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            const Complex z = entry_from_json(entries[static_cast<std::size_t>(i * cols + j)]);
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                throw ParseError("matrix entries must be finite");
            }
            m(i, j) = z;
        }
    }
    return m;
}

Json matrix_to_json(const ComplexMatrix& m) {
    Json entries = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            entries.push_back({m(i, j).real(), m(i, j).imag()});
        }
    }
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

ComplexMatrix matrix_from_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::vector<double> row;
        std::stringstream fields(line);
        std::string field;
        while (std::getline(fields, field, ',')) {
            try {
                std::size_t used = 0;
                const double value = std::stod(field, &used);
                while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used]))) {
                    ++used;
                }
                if (used != field.size()) throw ParseError("trailing characters");
                if (!std::isfinite(value)) throw ParseError("non-finite entry");
                row.push_back(value);
            } catch (const ParseError&) {
                throw;
            } catch (const std::exception&) {
                throw ParseError("invalid CSV field: '" + field + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw DimensionMismatch("CSV rows have inconsistent lengths");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ParseError("empty CSV input");
    }
    ComplexMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            m(i, j) = Complex(rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], 0.0);
        }
    }
    return m;
}

ComplexMatrix load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path.string() + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        throw ParseError("'" + path.string() + "' is empty");
    }
    if (text[first] == '{') {
        Json doc = Json::parse(text, nullptr, /*allow_exceptions=*/false);
        if (doc.is_discarded()) {
            throw ParseError("'" + path.string() + "' is not valid JSON");
        }
        return matrix_from_json(doc);
    }
    std::stringstream csv(text);
    return matrix_from_csv(csv);
}

void save_matrix(const ComplexMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError("cannot write '" + path.string() + "'");
    }
    out << matrix_to_json(m).dump(2) << "\n";
}

}  // namespace poscon
