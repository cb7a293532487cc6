#include "rfcd/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace rfcd {

size_t ChangeMap::count_changed() const {
    size_t n = 0;
    for (std::uint8_t v : values) n += (v != 0);
    return n;
}

std::uint8_t to_u8(double channel) {
    double c = channel < 0.0 ? 0.0 : (channel > 1.0 ? 1.0 : channel);
    return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

namespace {

void skip_pnm_whitespace(std::istream& in) {
    while (true) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
}

int read_pnm_int(std::istream& in) {
    skip_pnm_whitespace(in);
    int v = 0;
    if (!(in >> v)) throw std::runtime_error("malformed PNM header");
    return v;
}

}  // namespace

void write_ppm(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    std::vector<std::uint8_t> row(static_cast<size_t>(img.width) * 3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const Vec3& p = img.at(x, y);
            row[3 * x + 0] = to_u8(p.x);
            row[3 * x + 1] = to_u8(p.y);
            row[3 * x + 2] = to_u8(p.z);
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw std::runtime_error("short write: " + path);
}

Image read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char magic[2];
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '6') throw std::runtime_error("not a P6 PPM: " + path);
    int w = read_pnm_int(in), h = read_pnm_int(in), maxval = read_pnm_int(in);
    if (maxval != 255) throw std::runtime_error("unsupported PPM maxval in " + path);
    in.get();  // single whitespace after header
    Image img(w, h);
    std::vector<std::uint8_t> row(static_cast<size_t>(w) * 3);
    for (int y = 0; y < h; ++y) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
        if (!in) throw std::runtime_error("truncated PPM: " + path);
        for (int x = 0; x < w; ++x)
            img.at(x, y) = Vec3{row[3 * x] / 255.0, row[3 * x + 1] / 255.0, row[3 * x + 2] / 255.0};
    }
    return img;
}

void write_mask(const ChangeMap& map, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "P5\n";
    if (!map.provenance.empty()) out << "# provenance " << map.provenance << "\n";
    out << map.width << " " << map.height << "\n255\n";
    std::vector<std::uint8_t> row(static_cast<size_t>(map.width));
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) row[x] = map.at(x, y) ? 255 : 0;
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw std::runtime_error("short write: " + path);
}

ChangeMap read_mask(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char magic[2];
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '5') throw std::runtime_error("not a P5 PGM: " + path);
    // Recover provenance from the header comment if present.
    std::string provenance;
    while (true) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            auto pos = line.find("provenance ");
            if (pos != std::string::npos) provenance = line.substr(pos + 11);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int w = read_pnm_int(in), h = read_pnm_int(in), maxval = read_pnm_int(in);
    if (maxval != 255) throw std::runtime_error("unsupported PGM maxval in " + path);
    in.get();
    ChangeMap map(w, h);
    map.provenance = provenance;
    std::vector<std::uint8_t> row(static_cast<size_t>(w));
    for (int y = 0; y < h; ++y) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
        if (!in) throw std::runtime_error("truncated PGM: " + path);
        for (int x = 0; x < w; ++x) map.at(x, y) = row[x] >= 128 ? 1 : 0;
    }
    return map;
}

double image_mse(const Image& a, const Image& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("image_mse: size mismatch");
    double acc = 0;
    for (size_t i = 0; i < a.pixels.size(); ++i) {
        Vec3 d = a.pixels[i] - b.pixels[i];
        acc += dot(d, d);
    }
    return acc / (3.0 * static_cast<double>(a.pixels.size()));
}

double image_psnr(const Image& a, const Image& b) {
    double mse = image_mse(a, b);
    if (mse <= 0) return std::numeric_limits<double>::infinity();
    return -10.0 * std::log10(mse);
}

}  // namespace rfcd
