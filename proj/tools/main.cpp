#include "textmountain/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return textmountain::dispatch(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
