#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "echoscope/log.hpp"

int main(int argc, char** argv) {
    echoscope::init_logging();
    doctest::Context ctx(argc, argv);
    return ctx.run();
}
