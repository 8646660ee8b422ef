#include "hubprior/cli.hpp"

int main(int argc, char** argv) {
    return hubprior::run_cli(argc, argv);
}
