#pragma once

// Hand-labeled password classifier cases. P = ProbablePassword,
// G = DigitGroupVariant, K = KeywordPassword.

#include <array>
#include <string_view>

namespace oracle {

struct PasswordCase {
  std::string_view ssid;
  bool probable;
  bool grouped;
  bool keyword;
};

inline constexpr std::array<PasswordCase, 30> kPasswordCases = {{
    {"1234567812345678", true, false, false},
    {"1234 5678 1234 5678", true, true, false},
    {"1234.5678.1234.5678", true, true, false},
    {"1234,5678,1234,5678", true, true, false},
    {"PW:1234567812345678", true, false, true},
    {"WPA:1234567812345678", true, false, true},
    {"(WPA/WPA2:)8765432187654321", true, false, true},
    {"FritzBox 7490", false, false, false},
    {"Fritz!Box 7590", false, false, false},
    {"home", false, false, false},
    {"", false, false, false},
    {"123456781234567", false, false, false},
    {"12345678123456789012", true, false, false},
    {"1234 5678 1234 567", false, false, false},
    {"1234 5678 1234 5678 12", true, true, false},
    {"1234-5678-1234-5678", false, false, false},
    {"12345 678 1234 5678", false, false, false},
    {"1234  5678 1234 5678", false, false, false},
    {"net 1234 5678 9012 3456 x", true, true, false},
    {"password", false, false, true},
    {"MyPassWord", false, false, true},
    {"PW", false, false, true},
    {"Kennwort123", false, false, true},
    {"KENNWORT", false, false, true},
    {"wpa2-home", false, false, true},
    {"Pawel", false, false, false},
    {"UPC1234567", false, false, false},
    {"passage 1234 5678 1234 5678", true, true, true},
    {"a1b2c3d4e5f6g7h8i9j0k1l2m3n4o5p6", false, false, false},
    {"12.34.56.78.12.34.56.78", false, false, false},
}};

}  // namespace oracle
