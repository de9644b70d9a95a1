#pragma once

#include <optional>
#include <string>
#include <vector>

#include "amodal/image.hpp"
#include "amodal/mask.hpp"

namespace amodal {

// One labeled cell of a result panel; a missing image renders as a hatched
// placeholder so the panel still comes out.
struct PanelCell {
    std::string label;
    std::optional<Image> image;
};

// Side-by-side panel with a small bitmap-font label strip above each cell.
Image render_panel(const std::vector<PanelCell>& cells);

// 5x7 bitmap text, uppercased; characters without a glyph render as blanks.
void draw_text(Image& image, int y, int x, const std::string& text, RGB color);

}  // namespace amodal
