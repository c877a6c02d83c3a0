#include "impliedcorr/cli.hpp"

int main(int argc, char** argv) {
    return icorr::cli_dispatch(argc, argv);
}
