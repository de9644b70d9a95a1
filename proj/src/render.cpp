#include "amodal/render.hpp"

#include <algorithm>
#include <cctype>

namespace amodal {

namespace {

// 5x7 glyphs, one byte per row, bit 4 = leftmost column.
struct Glyph {
    char ch;
    std::uint8_t rows[7];
};

constexpr Glyph kFont[] = {
    {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
    {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}},
    {'D', {0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E}},
    {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}},
    {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
    {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0E}},
    {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
    {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}},
    {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
    {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}},
    {'N', {0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11}},
    {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
    {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}},
    {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
    {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}},
    {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}},
    {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
    {'Y', {0x11, 0x11, 0x0A, 0x04, 0x04, 0x04, 0x04}},
    {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
};

const Glyph* find_glyph(char ch) {
    for (const auto& glyph : kFont)
        if (glyph.ch == ch) return &glyph;
    return nullptr;
}

constexpr int kLabelHeight = 12;
constexpr int kGutter = 4;
constexpr RGB kPanelBg{24, 24, 24};
constexpr RGB kLabelColor{240, 240, 240};
constexpr RGB kPlaceholder{64, 64, 64};

}  // namespace

void draw_text(Image& image, int y, int x, const std::string& text, RGB color) {
    int cursor = x;
    for (char raw : text) {
        const char ch = static_cast<char>(std::toupper(static_cast<unsigned char>(raw)));
        if (const Glyph* glyph = (ch == ' ') ? nullptr : find_glyph(ch)) {
            for (int row = 0; row < 7; ++row)
                for (int col = 0; col < 5; ++col)
                    if (glyph->rows[row] & (0x10 >> col)) {
                        const int py = y + row;
                        const int px = cursor + col;
                        if (py >= 0 && py < image.height() && px >= 0 && px < image.width())
                            image.set(py, px, color);
                    }
        }
        cursor += 6;
    }
}

Image render_panel(const std::vector<PanelCell>& cells) {
    int cell_h = 64;
    int cell_w = 64;
    for (const auto& cell : cells) {
        if (!cell.image) continue;
        cell_h = std::max(cell_h, cell.image->height());
        cell_w = std::max(cell_w, cell.image->width());
    }

    const int n = static_cast<int>(cells.size());
    const int panel_h = kLabelHeight + cell_h + 2 * kGutter;
    const int panel_w = n * cell_w + (n + 1) * kGutter;
    Image panel(panel_h, panel_w, kPanelBg);

    for (int i = 0; i < n; ++i) {
        const int x0 = kGutter + i * (cell_w + kGutter);
        const int y0 = kLabelHeight + kGutter;
        draw_text(panel, 3, x0, cells[i].label, kLabelColor);
        if (cells[i].image) {
            paste(panel, *cells[i].image, x0, y0);
        } else {
            // hatched placeholder for a missing artifact
            for (int y = 0; y < cell_h; ++y)
                for (int x = 0; x < cell_w; ++x)
                    panel.set(y0 + y, x0 + x,
                              ((x + y) / 6) % 2 == 0 ? kPlaceholder : kPanelBg);
        }
    }
    return panel;
}

}  // namespace amodal
