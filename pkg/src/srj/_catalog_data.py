"""Bundled relaxation-factor schemes for cycle lengths 2..20.

Factor tuples are stored verbatim in application (cycle) order for the
five ellipse aspect ratios the library ships schemes for.  Generated
once and frozen; do not edit by hand.
"""

SCHEME_FACTORS = {
    (2, "0"): (0.5690356, 1.70710677),
    (3, "0"): (3.49402001, 0.53277775, 0.9245737),
    (4, "0"): (0.70836006, 1.46555904, 6.00294106, 0.51881773),
    (5, "0"): (2.17132943, 0.97045898, 0.51215172, 9.23070087, 0.62486987),
    (6, "0"): (0.78456896, 3.03760966, 13.17650299, 0.50847872, 1.30215429, 0.58365629),
    (7, "0"): (0.50624677, 0.98455485, 1.69891723, 0.69311373, 17.84007874, 4.063045, 0.56014437),
    (8, "0"): (5.24709171, 23.2213142, 0.83002589, 0.54540533, 0.50479132, 0.64064728, 1.22055571, 2.15908451),
    (9, "0"): (0.60746266, 0.50379038, 1.49082726, 6.58949616, 0.99056048, 0.74168003, 0.53553197, 2.68192018, 29.3201555),
    (10, "0"): (0.50307289, 0.85987944, 36.13657316, 0.58501073, 0.68577217, 1.17301688, 3.26705563, 8.09012714, 1.79453894, 0.52858345),
    (11, "0"): (9.74878298, 3.91423663, 43.67026622, 0.52350202, 0.77740428, 0.99363986, 0.64784306, 0.56904981, 1.37652217, 2.13122571, 0.50254084),
    (12, "0"): (0.51967186, 0.502136, 1.60062418, 0.88089529, 1.14212703, 0.5572681, 11.56563689, 0.7214957, 0.62078228, 4.62343187, 2.50067832, 51.92170993),
    (13, "0"): (5.39452922, 60.89068271, 13.54056493, 0.51671135, 0.68157772, 0.54830598, 0.80462771, 0.99542885, 1.84503098, 0.60071874, 2.90272506, 0.50182066, 1.30484854),
    (14, "0"): (0.51437483, 0.50157028, 1.12052206, 1.4815068, 0.75022361, 70.57717917, 3.33726813, 0.89647097, 0.58538736, 0.5413206, 6.22748084, 15.67354847, 2.10956602, 0.65193728),
    (15, "0"): (0.50136817, 80.98119527, 0.82600199, 1.25587196, 0.62924226, 2.39411386, 17.96457474, 3.80424262, 0.7098291, 1.6719108, 0.57338285, 7.12225455, 0.99655627, 0.51249792, 0.53576477),
    (16, "0"): (92.10272776, 20.4136347, 4.30360397, 0.67888335, 0.53126985, 8.07882802, 0.61143075, 0.56379208, 0.90846298, 1.10458234, 0.50120269, 0.51096714, 1.87593302, 1.40127987, 2.69859625, 0.77372736),
    (17, "0"): (0.50106549, 0.65457349, 4.83532073, 103.94177396, 1.22034776, 0.55599891, 0.99731168, 0.5275797, 1.5566107, 0.59716511, 0.8432046, 0.5097021, 3.02295855, 23.02072172, 0.73369365, 2.0934855, 9.09718533),
    (18, "0"): (0.50095048, 0.50864452, 116.49833154, 0.54957426, 1.34371329, 3.36716161, 0.70224149, 25.78583082, 1.72176974, 0.52451158, 0.58554342, 0.91797527, 1.09234748, 2.32450583, 0.63507926, 0.79326944, 10.17731485, 5.3993702),
    (19, "0"): (3.73117675, 5.99573557, 0.75405501, 129.77239844, 0.99784208, 0.5442113, 11.31920792, 0.50085313, 2.56894868, 1.47457999, 0.50775129, 0.6191755, 0.85733643, 1.19342964, 1.89668891, 0.52193218, 28.70895814, 0.57593767, 0.67700928),
    (20, "0"): (0.50077028, 0.5069904, 1.30047524, 12.52311806, 1.6129012, 143.76536998, 1.08267819, 31.7907227, 4.11506368, 0.519743, 0.53968667, 6.62454016, 2.08135409, 2.82683304, 0.92571219, 0.72260429, 0.56790042, 0.60601294, 0.65641482, 0.80975928),
    (2, "1/10"): (0.56998789, 1.69859189),
    (3, "1/10"): (0.53391192, 3.44601684, 0.92457397),
    (4, "1/10"): (0.52000846, 5.84801488, 1.46164411, 0.70927878),
    (5, "1/10"): (0.97045893, 8.85298484, 2.15794431, 0.51336698, 0.62598727),
    (6, "1/10"): (3.00593438, 12.40210949, 0.78535133, 0.58484042, 1.30000478, 0.50970689),
    (7, "1/10"): (16.43010567, 4.0003348, 1.69275624, 0.56135711, 0.98455299, 0.69414294, 0.50748255),
    (8, "1/10"): (0.50603201, 20.86770462, 5.13612346, 0.83069204, 1.21911816, 2.14633476, 0.54663294, 0.64177848),
    (9, "1/10"): (25.6439171, 6.40794264, 0.5050344, 0.74261526, 2.6591608, 0.53676794, 0.99056047, 1.48706252, 0.60864258),
    (10, "1/10"): (30.68829417, 1.17192817, 1.78726047, 0.52982376, 0.50431918, 0.86044488, 7.8099309, 3.22986843, 0.68683046, 0.58621444),
    (11, "1/10"): (0.50378925, 35.93393042, 0.99363246, 0.57027053, 0.64897316, 0.52474653, 3.85735463, 9.33630714, 0.7782492, 1.37385524, 2.11904043),
    (12, "1/10"): (0.50338573, 41.31741418, 0.52091877, 0.62195236, 4.54033478, 0.55849849, 0.88139433, 1.1412681, 10.98051128, 0.72248676, 2.48180885, 1.59573262),
    (13, "1/10"): (0.60191355, 0.68265354, 2.87506858, 5.27753675, 0.54954273, 0.50307142, 0.51796, 1.30280397, 12.73581301, 46.78097204, 0.80539615, 1.8371467, 0.99541991),
    (14, "1/10"): (0.50282191, 52.2735576, 1.11983233, 14.595698, 0.58660159, 0.75115784, 0.65307138, 1.47791449, 0.89692809, 6.06783403, 0.51562534, 3.29845681, 2.09783992, 0.54256332),
    (15, "1/10"): (0.51374938, 1.66627373, 6.90948562, 0.53701048, 0.82671796, 0.50262045, 0.63040987, 16.55218436, 57.74880892, 3.75132855, 0.99656637, 0.57460771, 1.25425115, 0.71085879, 2.37743854),
    (16, "1/10"): (0.53251634, 1.10397129, 0.77459073, 0.50245545, 1.86764801, 63.16776026, 0.67996696, 0.56502152, 0.612616, 1.39841661, 0.51221886, 0.90885822, 7.80091195, 2.67565505, 18.59768396, 4.23314259),
    (17, "1/10"): (4.74387164, 8.74143558, 0.59837029, 0.52882897, 0.50231873, 0.73467077, 0.55723606, 2.08203762, 0.6557056, 0.84386349, 0.99731915, 1.21899192, 0.51095483, 20.72672602, 68.50019668, 2.99252749, 1.55226259),
    (18, "1/10"): (0.5022041, 0.55081535, 1.34139356, 0.58675992, 3.32758594, 73.7175464, 1.71554614, 1.09183698, 0.52576209, 2.30913802, 0.70328863, 0.63624059, 0.79408952, 22.93016201, 5.28260568, 9.72872304, 0.50989774, 0.91834936),
    (19, "1/10"): (1.1922696, 1.47107281, 0.754984, 0.5090049, 5.84897369, 0.50210705, 0.85794803, 0.67810534, 1.88818571, 3.68068961, 10.76141436, 0.52318366, 25.20121758, 0.62035781, 0.99785036, 0.57716248, 78.79939956, 2.54886524, 0.54545533),
    (20, "1/10"): (27.53285347, 83.72975055, 0.65754366, 11.83795003, 0.54093216, 0.81052691, 1.60793981, 6.44250844, 4.05164906, 0.50202419, 0.50824398, 0.72360616, 0.92605018, 0.5209947, 1.29850579, 1.08222029, 0.56913027, 2.8011136, 0.60720895, 2.0700968),
    (2, "1/5"): (1.67329868, 0.57289381),
    (3, "1/5"): (3.30826695, 0.5373787, 0.92457405),
    (4, "1/5"): (0.52365056, 0.71207692, 1.44990317, 5.42377641),
    (5, "1/5"): (0.51708553, 0.62939828, 7.87621952, 2.11836778, 0.97045893),
    (6, "1/5"): (10.52706852, 2.91384798, 1.29353361, 0.78773197, 0.58845872, 0.51346561),
    (7, "1/5"): (0.51126504, 0.69728394, 3.82161829, 1.67437171, 0.56506573, 0.98455481, 13.25519709),
    (8, "1/5"): (0.83271745, 0.64523131, 4.82675295, 0.55038743, 2.10859708, 1.21478179, 0.50982969, 15.96393814),
    (9, "1/5"): (0.99054685, 0.50884231, 0.54054782, 0.61224365, 0.74545738, 1.47574166, 2.59243292, 18.58247992, 5.91397015),
    (10, "1/5"): (0.50813454, 0.6900735, 1.1686967, 0.533621, 21.06405733, 0.58990017, 7.06842827, 1.76565972, 0.86219325, 3.1223753),
    (11, "1/5"): (0.50761003, 0.65242796, 23.38109951, 0.57400444, 8.27539085, 0.52855467, 2.08301117, 0.99363078, 1.36587294, 3.69478206, 0.78083252),
    (12, "1/5"): (1.13872598, 0.52473523, 2.42647806, 0.72552509, 0.50721069, 0.56226476, 9.5212926, 25.52113096, 0.62553501, 0.88294173, 1.58117851, 4.30608714),
    (13, "1/5"): (1.81376857, 10.79255978, 27.48184901, 4.95240233, 2.79456256, 1.29671323, 0.6859496, 0.60557162, 0.80775937, 0.55332843, 0.52178179, 0.50689955, 0.9954343),
    (14, "1/5"): (0.51945011, 0.50665244, 1.11768542, 0.54635948, 1.46703489, 3.18587451, 5.63006462, 2.06294125, 0.7539773, 12.07727937, 0.59030279, 0.89827566, 29.26841843, 0.65651632),
    (15, "1/5"): (13.36645552, 30.89028993, 0.71398235, 0.50645307, 0.82887223, 0.51757784, 0.57834595, 0.63396522, 1.24931321, 0.54081793, 6.33555139, 1.64934075, 2.32817313, 0.99656232, 3.59938118),
    (16, "1/5"): (0.91008368, 32.35924423, 0.56878365, 0.61624256, 0.51604983, 2.6086148, 1.38986873, 0.68328291, 1.10216036, 7.06508676, 0.77723577, 0.50628973, 4.0331308, 1.84305372, 14.64832029, 0.536331),
    (17, "1/5"): (0.60204809, 33.68750902, 1.5391942, 0.56101623, 0.73763853, 0.50615441, 1.21487444, 0.51478793, 2.90385064, 0.65915403, 15.91870643, 0.99732293, 7.81500258, 4.48656154, 2.04803864, 0.53264945, 0.84585323),
    (18, "1/5"): (17.16755739, 8.58203324, 0.50604092, 1.33437917, 0.70647254, 2.26371203, 0.91946802, 34.88850558, 3.21303678, 4.95751243, 0.51373245, 0.52958669, 0.63978006, 1.69691089, 0.59047345, 0.55460818, 1.09026941, 0.79657302),
    (19, "1/5"): (0.99785451, 0.54925773, 18.39057107, 0.52701147, 9.36281884, 0.51284094, 2.48979141, 1.18873926, 5.4448419, 35.97445695, 3.53558757, 1.8628211, 1.4605054, 0.68144074, 0.62396284, 0.75780222, 0.85979157, 0.58090237, 0.50594485),
    (20, "1/5"): (0.57288937, 36.95702075, 0.61086135, 0.50586281, 0.66098678, 3.87084352, 1.29256497, 2.03669706, 0.81285875, 0.72665698, 10.15421635, 19.58334469, 1.59307571, 1.08082848, 0.51208106, 5.94715006, 0.54474155, 2.72591983, 0.5248249, 0.92707131),
    (2, "1/3"): (0.58009423, 1.61475671),
    (3, "1/3"): (0.54601048, 3.01484954, 0.92457408),
    (4, "1/3"): (0.53273474, 4.60959599, 0.71897996, 1.42207901),
    (5, "1/3"): (2.02782143, 6.20847021, 0.52636835, 0.97045884, 0.63786073),
    (6, "1/3"): (0.79358883, 1.27804404, 2.71159702, 0.52285298, 7.69468612, 0.59745813),
    (7, "1/3"): (9.01421102, 0.70504972, 3.44669363, 1.63122788, 0.57430277, 0.5207143, 0.98455473),
    (8, "1/3"): (0.83769031, 1.20435204, 0.65379547, 2.02203906, 0.55974784, 0.51931866, 4.20943149, 10.15428711),
    (9, "1/3"): (0.5183584, 0.62120265, 0.54998076, 1.44897399, 0.99056019, 0.7524925, 11.12451034, 2.44332527, 4.97973358),
    (10, "1/3"): (0.51766971, 5.74097156, 11.94430379, 0.86647514, 1.71513908, 1.16092303, 0.69810077, 2.88849809, 0.5430979, 0.59907044),
    (11, "1/3"): (0.58330617, 1.34685534, 0.53806264, 0.66100147, 0.78720632, 6.48228504, 12.63494347, 0.51715946, 2.00027229, 3.35099357, 0.9936465),
    (12, "1/3"): (7.19345185, 13.21763033, 2.301418, 0.51677077, 0.53426362, 0.73301243, 0.88670167, 0.6344228, 1.54674947, 3.82533345, 1.13253407, 0.57164568),
    (13, "1/3"): (2.61594525, 0.51646796, 0.53132553, 0.69409679, 7.86844778, 0.61465857, 4.30651387, 0.81354555, 0.99544263, 13.71084518, 1.28204135, 0.56276371, 1.75922945),
    (14, "1/3"): (14.12921075, 1.11258401, 1.44134806, 2.94184398, 0.55583452, 4.78908121, 0.51622752, 0.66508152, 0.90163402, 8.50561058, 0.76097013, 1.9828288, 0.59952601, 0.52900621),
    (15, "1/3"): (14.48642564, 9.10177106, 0.55031875, 0.51603341, 0.58765634, 0.52714239, 0.83417426, 1.23747314, 0.72170963, 5.26980847, 0.99656684, 1.60955139, 0.64279542, 2.21639217, 3.27638036),
    (16, "1/3"): (0.78377061, 0.62526217, 0.52562193, 0.54585339, 1.09781681, 1.78590467, 14.79284308, 0.57816083, 2.4586654, 0.91310944, 9.65718979, 1.36954054, 3.61745717, 0.51587446, 0.69150587, 5.74512382),
    (17, "1/3"): (0.52436516, 10.17291044, 0.61119272, 0.51574268, 1.96968648, 6.21210459, 1.20494873, 0.99732608, 0.66770064, 15.05697411, 2.7084423, 0.74496189, 0.54218565, 3.96308173, 1.50827045, 0.57043683, 0.85073018),
    (18, "1/3"): (0.80268015, 0.92219534, 4.31145962, 1.08646238, 0.53913484, 2.96453265, 0.71434257, 0.56406383, 0.52331433, 0.64856217, 15.28572255, 2.16021516, 6.66831474, 10.65068252, 1.31758874, 1.65317168, 0.5156322, 0.59971285),
    (19, "1/3"): (0.51553868, 7.1121415, 0.76474781, 11.09221356, 4.66077265, 0.52242668, 0.63291549, 15.48494337, 1.8037996, 0.99785572, 2.35677891, 3.22588957, 1.18021839, 0.55874009, 0.53656909, 0.86430683, 1.43538507, 0.59021236, 0.68969701),
    (20, "1/3"): (0.61994079, 0.5542447, 0.92956967, 0.66952289, 0.58225288, 0.73419468, 0.52167002, 15.65937926, 3.49151906, 5.00938372, 1.27833205, 1.95972847, 0.51545881, 11.49957143, 7.54235807, 0.53439011, 1.07745477, 1.55800776, 2.5586843, 0.81859311),
    (2, "1/2"): (0.59563557, 1.50541872),
    (3, "1/2"): (0.56484541, 0.9245688, 2.54605612),
    (4, "1/2"): (0.73375507, 3.51442902, 1.36762629, 0.55263795),
    (5, "1/2"): (0.65617571, 0.54674458, 0.9704589, 4.31270689, 1.86254927),
    (6, "1/2"): (1.24704532, 2.37008646, 0.80603023, 0.61704862, 4.9370665, 0.54348006),
    (7, "1/2"): (0.54149044, 0.59447669, 5.41652909, 1.54840168, 0.9845544, 0.72173662, 2.86349551),
    (8, "1/2"): (0.54019056, 5.78430508, 3.32624599, 0.67231978, 0.58023364, 1.86326932, 0.84820779, 1.18325486),
    (9, "1/2"): (6.06843828, 3.74978583, 0.5392957, 0.99056864, 2.18266908, 1.39632673, 0.64065916, 0.57065124, 0.76751184),
    (10, "1/2"): (0.56388951, 6.29037877, 0.61905175, 4.13107823, 0.53865334, 2.49956211, 1.6191135, 0.7153856, 1.14510986, 0.87552324),
    (11, "1/2"): (0.67952702, 6.46575637, 1.84779287, 0.53817747, 0.99364015, 0.8007591, 2.80842724, 0.55893338, 0.60360767, 1.30897648, 4.47091216),
    (12, "1/2"): (6.60623628, 3.10568012, 0.59215413, 0.89462012, 0.74905399, 0.65370652, 4.77144259, 0.53781461, 1.11986881, 2.07889593, 0.55519275, 1.47989517),
    (13, "1/2"): (2.30978735, 1.25268301, 0.58341686, 0.82583806, 3.38846892, 1.65574798, 5.03656248, 0.99544475, 0.63442357, 6.71996498, 0.53753215, 0.71164398, 0.55229695),
    (14, "1/2"): (0.5500114, 6.81350362, 0.77590957, 0.53730728, 1.10217112, 0.57658532, 1.83507103, 1.39055807, 2.53760691, 0.68356729, 5.26917182, 3.65606827, 0.90860206, 0.61962197),
    (15, "1/2"): (5.47370042, 6.89103876, 0.84546621, 0.54816904, 2.76076389, 0.53712712, 0.66195405, 0.99643676, 0.73825278, 0.60796165, 1.21381076, 3.90725337, 1.53236617, 0.57115304, 2.01615777),
    (16, "1/2"): (0.56673831, 0.6448415, 0.53697797, 0.7976593, 5.6558776, 4.13962774, 1.6777469, 0.91941575, 2.97955895, 6.95497755, 0.59864266, 1.08883637, 0.54667133, 1.32911154, 2.19646221, 0.70920553),
    (17, "1/2"): (0.86073193, 5.80924455, 0.9978438, 3.18482579, 2.3803012, 7.01207131, 0.53685725, 4.36359145, 0.76081671, 1.44933689, 0.54542277, 1.82234187, 0.56313151, 0.63115087, 0.59100793, 1.18398732, 0.6860663),
    (18, "1/2"): (4.56120355, 0.56009249, 5.95395338, 0.61982757, 0.8157569, 1.97175496, 3.3908333, 1.07890479, 0.58477151, 0.73119493, 0.92774785, 2.55624736, 1.56992948, 1.28360488, 7.05683188, 0.53675096, 0.54439601, 0.6676193),
    (19, "1/2"): (4.74590573, 0.53666476, 2.12088425, 0.54351562, 3.58685822, 0.57950529, 6.08052385, 0.70750994, 0.87388224, 0.77954849, 1.69284254, 0.65233427, 7.09590848, 0.9977728, 2.73045577, 1.38567105, 0.55756252, 0.61053146, 1.16304593),
    (20, "1/2"): (2.90348415, 0.63969696, 0.93492526, 1.25009592, 7.13078781, 4.92003011, 0.830678, 0.60269106, 0.6879351, 6.19014037, 1.07030842, 1.81807115, 3.7710704, 0.55540038, 0.53658931, 0.7504016, 1.48936404, 0.54277116, 0.5750778, 2.26815286),
}

# Earlier real-axis-only schemes (includes the single-factor M=1 entry).
CLASSIC_REAL_AXIS_FACTORS = {
    1: (0.66666667,),
    2: (1.70710678, 0.56903559),
    3: (3.49402108, 0.53277784, 0.92457411),
    5: (9.23070105, 0.51215173, 0.97045899, 0.62486988, 2.1713295),
    7: (17.84007924, 0.50624677, 0.9845549, 1.69891732, 0.56014439, 4.06304526, 0.69311375),
}
