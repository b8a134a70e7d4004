// Hashes a directed probe, puts it on the simulated wire and verifies it
// the way an AP would.
//   hashed_probe [ssid] [ap-ssid]

#include <iostream>
#include <string>

#include "probelens/capture/frame.hpp"
#include "probelens/crypto.hpp"
#include "probelens/hashprobe.hpp"

int main(int argc, char** argv) {
  using namespace probelens;
  const capture::Ssid ssid(argc > 1 ? argv[1] : "home-network");
  const capture::Ssid ap(argc > 2 ? argv[2] : ssid.bytes());
  const auto mac = *capture::MacAddress::parse("02:5e:10:aa:03:7c");
  const capture::SequenceNumber seq(1234);

  const auto probe = hashprobe::make_hashed_probe(mac, seq, ssid);
  std::cout << "preimage " << crypto::to_hex(hashprobe::preimage(mac, seq, ssid)) << '\n'
            << "digest   " << crypto::to_hex(probe.digest) << '\n';

  const auto frame = hashprobe::encode_frame(probe, 6, -48);
  const auto decoded = hashprobe::decode_hashed(capture::decode_radiotap_frame(frame, frame.size()));
  if (!decoded) {
    std::cerr << "frame did not decode as a hashed probe\n";
    return 1;
  }
  const bool ok = hashprobe::ap_verify(*decoded, ap);
  std::cout << frame.size() << "-byte frame, AP \"" << ap.bytes() << "\" "
            << (ok ? "answers" : "ignores") << '\n';

  const auto e = hashprobe::salt_entropy();
  std::cout << "salt: " << e.mac_bits << " MAC bits + " << e.sn_bits << " SN bits\n";
  const auto o = hashprobe::bandwidth_overhead(147.0, 11.4, probe.trunc_len());
  std::cout << "overhead: " << o.avg_pkt_len_with_ssid << " -> " << o.new_avg_pkt_len_with_ssid
            << " bytes (+" << o.pct_increase << " %)\n";
}
