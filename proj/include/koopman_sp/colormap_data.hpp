#pragma once

// Generated by tools/gen_colormaps.py from matplotlib's colormaps; do not edit.

#include <array>
#include <cstdint>

namespace koopman_sp::colormap_data {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr std::array<Rgb, 256> kTwilight{{
    Rgb{226, 217, 226}, Rgb{225, 217, 226}, Rgb{224, 217, 226}, Rgb{222, 217, 225},
    Rgb{221, 217, 224}, Rgb{220, 217, 223}, Rgb{218, 216, 223}, Rgb{216, 216, 222},
    Rgb{214, 215, 221}, Rgb{212, 214, 220}, Rgb{210, 213, 219}, Rgb{208, 212, 217},
    Rgb{205, 211, 216}, Rgb{203, 210, 215}, Rgb{200, 208, 214}, Rgb{197, 207, 213},
    Rgb{194, 206, 212}, Rgb{191, 204, 211}, Rgb{188, 203, 209}, Rgb{185, 201, 208},
    Rgb{182, 200, 207}, Rgb{179, 198, 206}, Rgb{176, 197, 205}, Rgb{173, 195, 205},
    Rgb{170, 194, 204}, Rgb{167, 192, 203}, Rgb{164, 190, 202}, Rgb{161, 189, 201},
    Rgb{158, 187, 201}, Rgb{156, 185, 200}, Rgb{153, 184, 200}, Rgb{150, 182, 199},
    Rgb{147, 180, 198}, Rgb{146, 179, 198}, Rgb{142, 177, 197}, Rgb{140, 175, 197},
    Rgb{137, 173, 197}, Rgb{136, 172, 196}, Rgb{133, 169, 196}, Rgb{130, 167, 195},
    Rgb{128, 165, 195}, Rgb{127, 165, 195}, Rgb{124, 162, 194}, Rgb{122, 160, 194},
    Rgb{120, 158, 194}, Rgb{119, 157, 194}, Rgb{117, 154, 193}, Rgb{115, 152, 193},
    Rgb{113, 150, 193}, Rgb{113, 149, 192}, Rgb{110, 146, 192}, Rgb{109, 144, 192},
    Rgb{108, 142, 191}, Rgb{107, 141, 191}, Rgb{105, 138, 191}, Rgb{104, 136, 190},
    Rgb{103, 134, 190}, Rgb{103, 133, 190}, Rgb{102, 130, 189}, Rgb{101, 127, 189},
    Rgb{100, 125, 188}, Rgb{100, 124, 188}, Rgb{99, 121, 187}, Rgb{98, 119, 187},
    Rgb{98, 117, 186}, Rgb{97, 114, 186}, Rgb{97, 113, 185}, Rgb{96, 110, 184},
    Rgb{96, 108, 184}, Rgb{96, 105, 183}, Rgb{96, 103, 182}, Rgb{95, 101, 181},
    Rgb{95, 98, 180}, Rgb{95, 96, 180}, Rgb{95, 95, 179}, Rgb{95, 91, 178},
    Rgb{95, 89, 177}, Rgb{95, 87, 176}, Rgb{94, 84, 174}, Rgb{94, 82, 173},
    Rgb{94, 79, 172}, Rgb{94, 77, 171}, Rgb{94, 76, 170}, Rgb{94, 72, 168},
    Rgb{94, 70, 166}, Rgb{94, 67, 165}, Rgb{93, 65, 163}, Rgb{93, 62, 161},
    Rgb{93, 60, 160}, Rgb{93, 58, 158}, Rgb{92, 56, 157}, Rgb{92, 53, 154},
    Rgb{91, 50, 152}, Rgb{91, 48, 149}, Rgb{90, 46, 147}, Rgb{90, 43, 144},
    Rgb{89, 41, 142}, Rgb{88, 39, 139}, Rgb{88, 38, 138}, Rgb{87, 35, 133},
    Rgb{86, 33, 130}, Rgb{85, 31, 127}, Rgb{83, 30, 124}, Rgb{82, 28, 121},
    Rgb{81, 26, 117}, Rgb{79, 25, 114}, Rgb{79, 25, 112}, Rgb{76, 23, 107},
    Rgb{75, 22, 104}, Rgb{73, 21, 100}, Rgb{71, 20, 97}, Rgb{70, 20, 94},
    Rgb{68, 19, 90}, Rgb{66, 18, 87}, Rgb{65, 18, 86}, Rgb{63, 18, 81},
    Rgb{61, 17, 78}, Rgb{60, 17, 75}, Rgb{58, 17, 73}, Rgb{57, 17, 70},
    Rgb{55, 17, 68}, Rgb{54, 17, 66}, Rgb{54, 17, 65}, Rgb{52, 17, 62},
    Rgb{51, 17, 60}, Rgb{50, 18, 58}, Rgb{49, 19, 57}, Rgb{48, 20, 55},
    Rgb{48, 20, 55}, Rgb{49, 19, 55}, Rgb{51, 18, 55}, Rgb{52, 18, 56},
    Rgb{52, 18, 56}, Rgb{54, 17, 57}, Rgb{56, 17, 57}, Rgb{58, 17, 58},
    Rgb{59, 17, 59}, Rgb{61, 17, 60}, Rgb{63, 18, 61}, Rgb{65, 18, 61},
    Rgb{67, 18, 62}, Rgb{70, 18, 64}, Rgb{72, 19, 65}, Rgb{74, 19, 66},
    Rgb{77, 20, 67}, Rgb{79, 20, 68}, Rgb{82, 21, 69}, Rgb{84, 21, 70},
    Rgb{86, 21, 70}, Rgb{89, 22, 72}, Rgb{92, 23, 73}, Rgb{95, 23, 74},
    Rgb{97, 24, 75}, Rgb{100, 25, 75}, Rgb{103, 25, 76}, Rgb{105, 26, 77},
    Rgb{108, 27, 78}, Rgb{111, 28, 78}, Rgb{113, 29, 79}, Rgb{116, 30, 79},
    Rgb{118, 31, 79}, Rgb{121, 32, 80}, Rgb{123, 33, 80}, Rgb{126, 34, 80},
    Rgb{127, 35, 80}, Rgb{131, 37, 80}, Rgb{133, 38, 80}, Rgb{135, 39, 80},
    Rgb{138, 41, 80}, Rgb{140, 42, 80}, Rgb{142, 44, 80}, Rgb{144, 46, 80},
    Rgb{146, 47, 80}, Rgb{148, 49, 80}, Rgb{150, 51, 80}, Rgb{152, 53, 80},
    Rgb{154, 55, 80}, Rgb{156, 57, 80}, Rgb{158, 59, 80}, Rgb{160, 61, 80},
    Rgb{160, 62, 80}, Rgb{163, 65, 80}, Rgb{165, 67, 80}, Rgb{166, 69, 80},
    Rgb{168, 71, 80}, Rgb{169, 73, 80}, Rgb{171, 75, 80}, Rgb{172, 77, 81},
    Rgb{174, 80, 81}, Rgb{175, 82, 81}, Rgb{177, 84, 82}, Rgb{178, 86, 82},
    Rgb{179, 89, 83}, Rgb{181, 91, 83}, Rgb{182, 93, 84}, Rgb{183, 95, 85},
    Rgb{184, 97, 85}, Rgb{185, 100, 86}, Rgb{186, 102, 87}, Rgb{187, 105, 88},
    Rgb{188, 107, 89}, Rgb{189, 110, 90}, Rgb{190, 112, 91}, Rgb{191, 114, 93},
    Rgb{192, 117, 94}, Rgb{193, 119, 95}, Rgb{194, 122, 97}, Rgb{194, 124, 99},
    Rgb{195, 127, 100}, Rgb{196, 129, 102}, Rgb{197, 132, 104}, Rgb{197, 134, 106},
    Rgb{198, 135, 107}, Rgb{198, 139, 110}, Rgb{199, 142, 113}, Rgb{200, 144, 115},
    Rgb{200, 146, 117}, Rgb{201, 149, 120}, Rgb{201, 151, 123}, Rgb{202, 154, 125},
    Rgb{202, 156, 128}, Rgb{203, 159, 131}, Rgb{204, 161, 134}, Rgb{204, 163, 137},
    Rgb{205, 166, 140}, Rgb{205, 168, 143}, Rgb{206, 171, 146}, Rgb{207, 173, 150},
    Rgb{207, 174, 151}, Rgb{208, 178, 156}, Rgb{209, 180, 160}, Rgb{209, 182, 163},
    Rgb{210, 184, 167}, Rgb{211, 186, 170}, Rgb{212, 189, 173}, Rgb{213, 191, 177},
    Rgb{214, 193, 180}, Rgb{215, 195, 184}, Rgb{216, 197, 187}, Rgb{216, 199, 190},
    Rgb{217, 201, 194}, Rgb{218, 203, 197}, Rgb{219, 204, 200}, Rgb{220, 206, 203},
    Rgb{220, 207, 205}, Rgb{221, 209, 209}, Rgb{222, 211, 211}, Rgb{223, 212, 214},
    Rgb{223, 213, 216}, Rgb{224, 214, 218}, Rgb{224, 215, 219}, Rgb{225, 216, 221},
    Rgb{225, 216, 223}, Rgb{226, 217, 224}, Rgb{226, 217, 225}, Rgb{226, 217, 226},
}};

inline constexpr std::array<Rgb, 256> kViridis{{
    Rgb{68, 1, 84}, Rgb{68, 2, 86}, Rgb{69, 4, 87}, Rgb{69, 5, 89},
    Rgb{70, 7, 90}, Rgb{70, 8, 92}, Rgb{70, 10, 93}, Rgb{70, 11, 94},
    Rgb{71, 13, 96}, Rgb{71, 14, 97}, Rgb{71, 16, 99}, Rgb{71, 17, 100},
    Rgb{71, 19, 101}, Rgb{72, 20, 103}, Rgb{72, 22, 104}, Rgb{72, 23, 105},
    Rgb{72, 24, 106}, Rgb{72, 26, 108}, Rgb{72, 27, 109}, Rgb{72, 28, 110},
    Rgb{72, 29, 111}, Rgb{72, 31, 112}, Rgb{72, 32, 113}, Rgb{72, 33, 115},
    Rgb{72, 35, 116}, Rgb{72, 36, 117}, Rgb{72, 37, 118}, Rgb{72, 38, 119},
    Rgb{72, 40, 120}, Rgb{72, 41, 121}, Rgb{71, 42, 122}, Rgb{71, 44, 122},
    Rgb{71, 45, 123}, Rgb{71, 46, 124}, Rgb{71, 47, 125}, Rgb{70, 48, 126},
    Rgb{70, 50, 126}, Rgb{70, 51, 127}, Rgb{70, 52, 128}, Rgb{69, 53, 129},
    Rgb{69, 55, 129}, Rgb{69, 56, 130}, Rgb{68, 57, 131}, Rgb{68, 58, 131},
    Rgb{68, 59, 132}, Rgb{67, 61, 132}, Rgb{67, 62, 133}, Rgb{66, 63, 133},
    Rgb{66, 64, 134}, Rgb{66, 65, 134}, Rgb{65, 66, 135}, Rgb{65, 68, 135},
    Rgb{64, 69, 136}, Rgb{64, 70, 136}, Rgb{63, 71, 136}, Rgb{63, 72, 137},
    Rgb{62, 73, 137}, Rgb{62, 74, 137}, Rgb{62, 76, 138}, Rgb{61, 77, 138},
    Rgb{61, 78, 138}, Rgb{60, 79, 138}, Rgb{60, 80, 139}, Rgb{59, 81, 139},
    Rgb{59, 82, 139}, Rgb{58, 83, 139}, Rgb{58, 84, 140}, Rgb{57, 85, 140},
    Rgb{57, 86, 140}, Rgb{56, 88, 140}, Rgb{56, 89, 140}, Rgb{55, 90, 140},
    Rgb{55, 91, 141}, Rgb{54, 92, 141}, Rgb{54, 93, 141}, Rgb{53, 94, 141},
    Rgb{53, 95, 141}, Rgb{52, 96, 141}, Rgb{52, 97, 141}, Rgb{51, 98, 141},
    Rgb{51, 99, 141}, Rgb{50, 100, 142}, Rgb{50, 101, 142}, Rgb{49, 102, 142},
    Rgb{49, 103, 142}, Rgb{49, 104, 142}, Rgb{48, 105, 142}, Rgb{48, 106, 142},
    Rgb{47, 107, 142}, Rgb{47, 108, 142}, Rgb{46, 109, 142}, Rgb{46, 110, 142},
    Rgb{46, 111, 142}, Rgb{45, 112, 142}, Rgb{45, 113, 142}, Rgb{44, 113, 142},
    Rgb{44, 114, 142}, Rgb{44, 115, 142}, Rgb{43, 116, 142}, Rgb{43, 117, 142},
    Rgb{42, 118, 142}, Rgb{42, 119, 142}, Rgb{42, 120, 142}, Rgb{41, 121, 142},
    Rgb{41, 122, 142}, Rgb{41, 123, 142}, Rgb{40, 124, 142}, Rgb{40, 125, 142},
    Rgb{39, 126, 142}, Rgb{39, 127, 142}, Rgb{39, 128, 142}, Rgb{38, 129, 142},
    Rgb{38, 130, 142}, Rgb{38, 130, 142}, Rgb{37, 131, 142}, Rgb{37, 132, 142},
    Rgb{37, 133, 142}, Rgb{36, 134, 142}, Rgb{36, 135, 142}, Rgb{35, 136, 142},
    Rgb{35, 137, 142}, Rgb{35, 138, 141}, Rgb{34, 139, 141}, Rgb{34, 140, 141},
    Rgb{34, 141, 141}, Rgb{33, 142, 141}, Rgb{33, 143, 141}, Rgb{33, 144, 141},
    Rgb{33, 145, 140}, Rgb{32, 146, 140}, Rgb{32, 146, 140}, Rgb{32, 147, 140},
    Rgb{31, 148, 140}, Rgb{31, 149, 139}, Rgb{31, 150, 139}, Rgb{31, 151, 139},
    Rgb{31, 152, 139}, Rgb{31, 153, 138}, Rgb{31, 154, 138}, Rgb{30, 155, 138},
    Rgb{30, 156, 137}, Rgb{30, 157, 137}, Rgb{31, 158, 137}, Rgb{31, 159, 136},
    Rgb{31, 160, 136}, Rgb{31, 161, 136}, Rgb{31, 161, 135}, Rgb{31, 162, 135},
    Rgb{32, 163, 134}, Rgb{32, 164, 134}, Rgb{33, 165, 133}, Rgb{33, 166, 133},
    Rgb{34, 167, 133}, Rgb{34, 168, 132}, Rgb{35, 169, 131}, Rgb{36, 170, 131},
    Rgb{37, 171, 130}, Rgb{37, 172, 130}, Rgb{38, 173, 129}, Rgb{39, 173, 129},
    Rgb{40, 174, 128}, Rgb{41, 175, 127}, Rgb{42, 176, 127}, Rgb{44, 177, 126},
    Rgb{45, 178, 125}, Rgb{46, 179, 124}, Rgb{47, 180, 124}, Rgb{49, 181, 123},
    Rgb{50, 182, 122}, Rgb{52, 182, 121}, Rgb{53, 183, 121}, Rgb{55, 184, 120},
    Rgb{56, 185, 119}, Rgb{58, 186, 118}, Rgb{59, 187, 117}, Rgb{61, 188, 116},
    Rgb{63, 188, 115}, Rgb{64, 189, 114}, Rgb{66, 190, 113}, Rgb{68, 191, 112},
    Rgb{70, 192, 111}, Rgb{72, 193, 110}, Rgb{74, 193, 109}, Rgb{76, 194, 108},
    Rgb{78, 195, 107}, Rgb{80, 196, 106}, Rgb{82, 197, 105}, Rgb{84, 197, 104},
    Rgb{86, 198, 103}, Rgb{88, 199, 101}, Rgb{90, 200, 100}, Rgb{92, 200, 99},
    Rgb{94, 201, 98}, Rgb{96, 202, 96}, Rgb{99, 203, 95}, Rgb{101, 203, 94},
    Rgb{103, 204, 92}, Rgb{105, 205, 91}, Rgb{108, 205, 90}, Rgb{110, 206, 88},
    Rgb{112, 207, 87}, Rgb{115, 208, 86}, Rgb{117, 208, 84}, Rgb{119, 209, 83},
    Rgb{122, 209, 81}, Rgb{124, 210, 80}, Rgb{127, 211, 78}, Rgb{129, 211, 77},
    Rgb{132, 212, 75}, Rgb{134, 213, 73}, Rgb{137, 213, 72}, Rgb{139, 214, 70},
    Rgb{142, 214, 69}, Rgb{144, 215, 67}, Rgb{147, 215, 65}, Rgb{149, 216, 64},
    Rgb{152, 216, 62}, Rgb{155, 217, 60}, Rgb{157, 217, 59}, Rgb{160, 218, 57},
    Rgb{162, 218, 55}, Rgb{165, 219, 54}, Rgb{168, 219, 52}, Rgb{170, 220, 50},
    Rgb{173, 220, 48}, Rgb{176, 221, 47}, Rgb{178, 221, 45}, Rgb{181, 222, 43},
    Rgb{184, 222, 41}, Rgb{186, 222, 40}, Rgb{189, 223, 38}, Rgb{192, 223, 37},
    Rgb{194, 223, 35}, Rgb{197, 224, 33}, Rgb{200, 224, 32}, Rgb{202, 225, 31},
    Rgb{205, 225, 29}, Rgb{208, 225, 28}, Rgb{210, 226, 27}, Rgb{213, 226, 26},
    Rgb{216, 226, 25}, Rgb{218, 227, 25}, Rgb{221, 227, 24}, Rgb{223, 227, 24},
    Rgb{226, 228, 24}, Rgb{229, 228, 25}, Rgb{231, 228, 25}, Rgb{234, 229, 26},
    Rgb{236, 229, 27}, Rgb{239, 229, 28}, Rgb{241, 229, 29}, Rgb{244, 230, 30},
    Rgb{246, 230, 32}, Rgb{248, 230, 33}, Rgb{251, 231, 35}, Rgb{253, 231, 37},
}};

}  // namespace koopman_sp::colormap_data
