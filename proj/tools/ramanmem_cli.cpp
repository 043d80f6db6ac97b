#include "ramanmem/cli.hpp"

int main(int argc, char** argv) {
    return ramanmem::cli::run(argc, argv);
}
