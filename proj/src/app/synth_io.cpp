#include "tmpfc/app/synth_io.hpp"

#include <cstdio>

#include "tmpfc/app/report.hpp"
#include "tmpfc/app/table.hpp"
#include "tmpfc/error.hpp"
#include "tmpfc/pgm.hpp"

namespace tmpfc::app {

namespace fs = std::filesystem;

fs::path write_sequence(const fs::path& root, const MaskSequence& masks, std::optional<GroupLabel> group) {
  const std::string& id = masks.manifest.case_id;
  const fs::path frame_dir = root / "frames" / id;
  const fs::path manifest_dir = root / "manifests";
  std::error_code ec;
  fs::create_directories(frame_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + frame_dir.string() + ": " + ec.message());
  fs::create_directories(manifest_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + manifest_dir.string() + ": " + ec.message());

  Manifest m = masks.manifest;
  m.group_label = group;
  m.frame_paths.clear();
  for (std::size_t t = 0; t < masks.frames.size(); ++t) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu.pgm", t);
    write_pgm(frame_dir / name, masks.frames[t]);
    m.frame_paths.push_back(fs::absolute(frame_dir / name));
  }
  const fs::path out = fs::absolute(manifest_dir / (id + ".json"));
  save_manifest(out, m);
  return out;
}

void write_cohort(const fs::path& root, const std::vector<synth::CohortMember>& cohort,
                  const synth::CohortOptions& options) {
  synth::RenderParams render;
  render.width = options.width;
  render.height = options.height;

  Table truth{{"case_id", "truth_f1", "truth_f2", "target_normalized", "cmvd_label"}, {}};
  Table covariates{{"case_id", "tmpfc_manual", "cmvd_label", "group_label", "ea_ratio", "ea_prime_ratio"}, {}};
  auto opt = [](const auto& v) { return v ? std::to_string(*v) : std::string(); };
  auto real = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  auto flag = [](const std::optional<bool>& v) { return v ? (*v ? "true" : "false") : ""; };

  for (const auto& member : cohort) {
    const auto& seq = member.sequence;
    const auto& rec = member.record;
    write_sequence(root, synth::render_masks(seq, render), rec.group_label);
    truth.rows.push_back({seq.curve.case_id, opt(seq.truth_f1), opt(seq.truth_f2),
                          format_real(member.target_normalized), flag(rec.cmvd_label)});
    covariates.rows.push_back({rec.case_id, real(rec.tmpfc_manual), flag(rec.cmvd_label),
                               rec.group_label ? std::string(to_string(*rec.group_label)) : std::string(),
                               real(rec.ea_ratio), real(rec.ea_prime_ratio)});
  }
  write_atomic(root / "truth.csv", write_csv(truth));
  write_atomic(root / "covariates.csv", write_csv(covariates));
}

}  // namespace tmpfc::app
