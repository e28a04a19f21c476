#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "rkm/numerics.hpp"

int main(int argc, char** argv)
{
    // Diagnostics are exercised explicitly where they matter; keep the log clean.
    rkm::set_warning_sink([](const std::string&) {});
    doctest::Context ctx(argc, argv);
    return ctx.run();
}
