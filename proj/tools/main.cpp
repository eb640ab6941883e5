#include <iostream>

#include "mlchaos/cli.hpp"

int main(int argc, char** argv) {
    return mlchaos::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
