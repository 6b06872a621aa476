#include <CLI11.hpp>

#include <iostream>

#include "spcgt/calculator.hpp"
#include "spcgt/errors.hpp"

namespace {

enum ExitCode { kOk = 0, kCheckFailed = 1, kUsage = 2, kUnsupported = 3, kResource = 4, kInternal = 5 };

int fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << "spcgt: " << kind << ": " << message << "\n";
  std::cout << spcgt::Json{{"error", {{"kind", kind}, {"message", message}}}}.dump(2) << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symplectic congruence group toolkit"};
  app.require_subcommand(1);

  unsigned g = 0, boundary = 1;
  std::uint64_t level = 0;
  bool force = false;
  std::string space, module_spec, direction, suite = "quick";

  auto* abel = app.add_subcommand("abelianize", "H_1 of the level-L mapping class group");
  abel->add_option("--g", g, "genus")->required();
  abel->add_option("--L", level, "level")->required();
  abel->add_option("--boundary", boundary, "boundary components (0 or 1)")->check(CLI::IsMember({0u, 1u}));
  abel->add_flag("--force", force, "allow g below the theorem range");

  auto* pic = app.add_subcommand("picard", "Picard divisibility of level-L moduli spaces");
  pic->add_option("--space", space, "mg or ag")->required()->check(CLI::IsMember({"mg", "ag"}));
  pic->add_option("--g", g, "genus")->required();
  pic->add_option("--L", level, "level")->required();

  auto* h1 = app.add_subcommand("h1", "twisted H^1 or H_1 of Sp_2g(Z/L)");
  h1->add_option("--g", g, "genus")->required();
  h1->add_option("--L", level, "level")->required();
  h1->add_option("--module", module_spec, "trivial | standard | adjoint | wedge3 | wedge3-mod-omega | dual-of-<spec>")
      ->required();
  h1->add_option("--direction", direction, "co or ho")->required()->check(CLI::IsMember({"co", "ho"}));

  auto* verify = app.add_subcommand("verify", "run the verification suites");
  verify->add_option("--suite", suite, "quick or full")->check(CLI::IsMember({"quick", "full"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    spcgt::Json out;
    int code = kOk;
    if (*abel) {
      out = spcgt::cmd_abelianize(g, level, boundary, force);
      for (const auto& w : out["warnings"]) std::cerr << "spcgt: warning: " << w.get<std::string>() << "\n";
    } else if (*pic) {
      out = spcgt::cmd_picard(space, g, level);
    } else if (*h1) {
      spcgt::H1Options opt;
      opt.enumeration.cache_dir = spcgt::default_cache_dir();
      out = spcgt::cmd_h1(g, level, module_spec, direction, opt);
    } else {
      bool passed = false;
      out = spcgt::cmd_verify(suite, spcgt::default_cache_dir(), passed);
      for (const auto& c : out["checks"])
        std::cerr << (c["passed"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << ": "
                  << c["detail"].get<std::string>() << "\n";
      code = passed ? kOk : kCheckFailed;
    }
    std::cout << out.dump(2) << "\n";
    return code;
  } catch (const spcgt::UnsupportedCase& e) {
    return fail("unsupported_case", e.what(), kUnsupported);
  } catch (const spcgt::InvalidArgument& e) {
    return fail("invalid_argument", e.what(), kUsage);
  } catch (const spcgt::ResourceLimit& e) {
    return fail("resource_limit", e.what(), kResource);
  } catch (const std::exception& e) {
    return fail("internal_error", e.what(), kInternal);
  }
}
