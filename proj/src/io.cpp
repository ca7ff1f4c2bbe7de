#include "reslab/io.hpp"

#include "reslab/errors.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace reslab {

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::string series_to_csv(const TimeSeries& series)
{
    std::ostringstream os;
    os << "t";
    for (Eigen::Index c = 0; c < series.components(); ++c) os << ",c" << c;
    os << "\n";
    for (Eigen::Index t = 0; t < series.length(); ++t) {
        os << fmt(static_cast<double>(t) * series.dt);
        for (Eigen::Index c = 0; c < series.components(); ++c)
            os << "," << fmt(series.samples(c, t));
        os << "\n";
    }
    return os.str();
}

TimeSeries series_from_csv(const std::string& text)
{
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line) && (line.empty() || line[0] == '#')) {}
    if (line.empty()) throw config_error("series_from_csv: empty input");
    const std::size_t n = split(line, ',').size() - 1;
    if (n < 1) throw config_error("series_from_csv: no components");

    std::vector<double> times;
    std::vector<std::vector<double>> rows(n);
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split(line, ',');
        if (cells.size() != n + 1) throw config_error("series_from_csv: ragged row");
        times.push_back(std::stod(cells[0]));
        for (std::size_t c = 0; c < n; ++c) rows[c].push_back(std::stod(cells[c + 1]));
    }
    if (times.empty()) throw config_error("series_from_csv: no samples");

    TimeSeries series;
    series.dt = times.size() > 1 ? times[1] - times[0] : 1.0;
    series.samples.resize(static_cast<Eigen::Index>(n),
                          static_cast<Eigen::Index>(times.size()));
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t t = 0; t < times.size(); ++t)
            series.samples(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t)) =
                rows[c][t];
    return series;
}

namespace {

std::vector<std::string> metric_names(const MetricSet& metrics)
{
    std::vector<std::string> names;
    if (metrics.valid_time) names.push_back("valid_time");
    if (metrics.lambda_qr) names.push_back("lambda_qr");
    if (metrics.lambda_mf) names.push_back("lambda_mf");
    if (metrics.rank) names.push_back("rank");
    if (metrics.mc) names.push_back("mc");
    return names;
}

}  // namespace

std::string diagram_to_csv(const PhaseDiagram& diagram)
{
    const auto names = metric_names(diagram.spec.metrics);
    std::ostringstream os;
    os << "gA2,n_sin2";
    for (const auto& m : names) os << "," << m << "_mean," << m << "_std";
    os << ",diverged_frac,trials\n";
    for (std::size_t i = 0; i < diagram.spec.gA2_axis.size(); ++i) {
        for (std::size_t j = 0; j < diagram.spec.nsin2_axis.size(); ++j) {
            const CellStats& cell = diagram.cells[i][j];
            os << fmt(diagram.spec.gA2_axis[i]) << "," << fmt(diagram.spec.nsin2_axis[j]);
            for (const auto& m : names) {
                const double mean = cell.mean.count(m) ? cell.mean.at(m) : 0.0;
                const double sd = cell.stddev.count(m) ? cell.stddev.at(m) : 0.0;
                os << "," << fmt(mean) << "," << fmt(sd);
            }
            os << "," << fmt(cell.diverged_frac) << "," << cell.trials_completed << "\n";
        }
    }
    return os.str();
}

DiagramTable diagram_from_csv(const std::string& text)
{
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line) && (line.empty() || line[0] == '#')) {}
    if (line.empty()) throw config_error("diagram_from_csv: empty input");
    const auto header = split(line, ',');
    if (header.size() < 3 || header[0] != "gA2" || header[1] != "n_sin2")
        throw config_error("diagram_from_csv: unexpected header");

    DiagramTable table;
    for (std::size_t c = 2; c < header.size(); ++c) table.columns.push_back(header[c]);

    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split(line, ',');
        if (cells.size() != header.size())
            throw config_error("diagram_from_csv: ragged row");
        std::vector<double> row;
        for (const auto& cell : cells) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }

    // Rows are emitted j-fastest; recover both axes from the unique values.
    for (const auto& row : rows) {
        bool found = false;
        for (double v : table.gA2_axis)
            if (v == row[0]) found = true;
        if (!found) table.gA2_axis.push_back(row[0]);
        found = false;
        for (double v : table.nsin2_axis)
            if (v == row[1]) found = true;
        if (!found) table.nsin2_axis.push_back(row[1]);
    }

    const std::size_t ni = table.gA2_axis.size(), nj = table.nsin2_axis.size();
    if (rows.size() != ni * nj) throw config_error("diagram_from_csv: not a full grid");
    table.values.assign(table.columns.size(),
                        std::vector<std::vector<double>>(ni, std::vector<double>(nj)));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t i = r / nj, j = r % nj;
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            table.values[c][i][j] = rows[r][c + 2];
    }
    return table;
}

std::string contour_to_csv(const std::vector<Polyline>& polylines)
{
    std::ostringstream os;
    os << "polyline,gA2,n_sin2\n";
    for (std::size_t k = 0; k < polylines.size(); ++k)
        for (const ContourVertex& v : polylines[k])
            os << k << "," << fmt(v[0]) << "," << fmt(v[1]) << "\n";
    return os.str();
}

std::vector<Polyline> contour_from_csv(const std::string& text)
{
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line) && (line.empty() || line[0] == '#')) {}
    if (line.empty()) throw config_error("contour_from_csv: empty input");
    std::vector<Polyline> polylines;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split(line, ',');
        if (cells.size() != 3) throw config_error("contour_from_csv: ragged row");
        const std::size_t k = static_cast<std::size_t>(std::stoul(cells[0]));
        if (k >= polylines.size()) polylines.resize(k + 1);
        polylines[k].push_back({std::stod(cells[1]), std::stod(cells[2])});
    }
    return polylines;
}

std::string meanfield_contour_to_csv(const std::vector<ContourPoint>& points)
{
    std::ostringstream os;
    os << "n_sigma_in2,gA2_at_zero_crossing\n";
    for (const ContourPoint& p : points)
        os << fmt(p.n_sin2) << "," << fmt(p.gA2) << "\n";
    return os.str();
}

std::string bifurcation_to_csv(const BifurcationScan& scan)
{
    std::ostringstream os;
    os << "n_sin2,v0,is_fixed_point,diverged\n";
    for (std::size_t k = 0; k < scan.parameter_values.size(); ++k) {
        const auto& samples = scan.attractor_samples[k];
        if (samples.empty()) {
            os << fmt(scan.parameter_values[k]) << ",nan,"
               << (scan.is_fixed_point[k] ? 1 : 0) << "," << (scan.diverged[k] ? 1 : 0)
               << "\n";
            continue;
        }
        for (double v : samples)
            os << fmt(scan.parameter_values[k]) << "," << fmt(v) << ","
               << (scan.is_fixed_point[k] ? 1 : 0) << "," << (scan.diverged[k] ? 1 : 0)
               << "\n";
    }
    return os.str();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw config_error("write_file: cannot open " + path);
    os << content;
}

std::string read_file(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("read_file: cannot open " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::string fnv1a_hex(const std::string& text)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

}  // namespace reslab
