#include "habopt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "habopt/errors.hpp"

namespace habopt {

namespace {

struct Rgb {
  int r, g, b;
};

// Five-stop approximation of the viridis ramp, interpolated linearly.
Rgb colormap(double t) {
  static const Rgb stops[5] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * 4.0;
  const int lo = std::min(3, static_cast<int>(pos));
  const double w = pos - lo;
  auto lerp = [w](int a, int b) { return static_cast<int>(std::lround(a + w * (b - a))); };
  return {lerp(stops[lo].r, stops[lo + 1].r), lerp(stops[lo].g, stops[lo + 1].g),
          lerp(stops[lo].b, stops[lo + 1].b)};
}

std::string header(int width, int height) {
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
    << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  return s.str();
}

std::string label_text(const std::string& label, int y) {
  std::ostringstream s;
  s << "  <text x=\"4\" y=\"" << y
    << "\" font-family=\"monospace\" font-size=\"12\" fill=\"#333\">" << label
    << "</text>\n";
  return s.str();
}

}  // namespace

std::string heatmap_svg(const ScalarField& f, double vmin, double vmax,
                        const std::string& label) {
  const Grid& grid = f.grid();
  if (grid.dim() > 2) throw Error("heatmap_svg: only 1D and 2D fields are supported");
  if (!(vmax > vmin)) throw Error("heatmap_svg: vmax must exceed vmin");

  const int n0 = grid.cells_per_axis()[0];
  const int n1 = grid.dim() == 2 ? grid.cells_per_axis()[1] : 1;
  const int px = std::max(1, 512 / std::max(n0, n1));
  const int strip = grid.dim() == 1 ? 32 : px;  // 1D renders as a strip
  const int width = n0 * px;
  const int height = grid.dim() == 1 ? strip : n1 * px;
  const int margin = 18;

  std::ostringstream s;
  s << header(width, height + margin);
  const int nc = grid.total_cells();
  for (int i = 0; i < nc; ++i) {
    const int i0 = grid.coord(i, 0);
    const int i1 = grid.dim() == 2 ? grid.coord(i, 1) : 0;
    const double t = (f[i] - vmin) / (vmax - vmin);
    const Rgb c = colormap(t);
    const int x = i0 * px;
    // axis 1 points up in the plot, SVG y points down
    const int y = grid.dim() == 2 ? (n1 - 1 - i1) * px : 0;
    const int h = grid.dim() == 1 ? strip : px;
    s << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << px << "\" height=\""
      << h << "\" fill=\"rgb(" << c.r << "," << c.g << "," << c.b << ")\"/>\n";
  }
  s << label_text(label, height + margin - 5);
  s << "</svg>\n";
  return s.str();
}

std::string profile_svg(const ScalarField& f, double vmin, double vmax,
                        const std::string& label) {
  const Grid& grid = f.grid();
  if (grid.dim() != 1) throw Error("profile_svg: only 1D fields are supported");
  if (!(vmax > vmin)) throw Error("profile_svg: vmax must exceed vmin");

  const int width = 512;
  const int height = 192;
  const int margin = 18;

  std::ostringstream s;
  s << header(width, height + margin);
  s << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
    << "\" fill=\"#fafafa\" stroke=\"#999\"/>\n";
  s << "  <polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
  const int nc = grid.total_cells();
  for (int i = 0; i < nc; ++i) {
    const double x = grid.center(i, 0) * width;
    const double t = std::clamp((f[i] - vmin) / (vmax - vmin), 0.0, 1.0);
    const double y = (1.0 - t) * (height - 8) + 4;
    s << (i ? " " : "") << x << "," << y;
  }
  s << "\"/>\n";
  s << label_text(label, height + margin - 5);
  s << "</svg>\n";
  return s.str();
}

}  // namespace habopt
