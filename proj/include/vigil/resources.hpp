#pragma once

// Built-in copies of the files under data/. Kept byte-identical to them;
// resources_test checks that.

#include <string_view>

namespace vigil::resources {

inline constexpr std::string_view kLingoPt = R"vigil(# Brazilian Portuguese twitter lingo: abbreviation<TAB>expansion
# Keys are lowercase and whitespace-free; no expansion word is itself a key.
abs	abraço
blz	beleza
vc	você
vcs	vocês
tb	também
tbm	também
q	que
pq	porque
n	não
nao	não
msm	mesmo
mto	muito
mt	muito
mta	muita
hj	hoje
ta	está
tá	está
to	estou
tô	estou
kd	cadê
cmg	comigo
fds	fim de semana
obg	obrigado
vlw	valeu
flw	falou
bjs	beijos
qdo	quando
qnd	quando
qto	quanto
tds	todos
td	tudo
dps	depois
agr	agora
mds	meu deus
sdds	saudades
pfv	por favor
cm	com
pra	para
eh	é
aki	aqui
msg	mensagem
ngm	ninguém
vdd	verdade
)vigil";

inline constexpr std::string_view kStopwordsPt = R"vigil(# Portuguese stopwords, one per line
de
a
o
que
e
é
do
da
em
um
para
com
não
uma
os
no
se
na
por
mais
as
dos
como
mas
ao
ele
das
à
seu
sua
ou
quando
muito
nos
já
eu
também
só
pelo
pela
até
isso
ela
entre
depois
sem
mesmo
aos
seus
quem
nas
me
esse
eles
você
essa
num
nem
suas
meu
às
minha
numa
pelos
elas
qual
nós
lhe
deles
essas
esses
pelas
este
dele
tu
te
vocês
vos
lhes
meus
minhas
teu
tua
teus
tuas
nosso
nossa
nossos
nossas
dela
delas
esta
estes
estas
aquele
aquela
aqueles
aquelas
isto
aquilo
estou
está
estamos
estão
estive
esteve
estivemos
estiveram
estava
estávamos
estavam
estivera
estivéramos
esteja
estejamos
estejam
estivesse
estivéssemos
estivessem
estiver
estivermos
estiverem
hei
há
havemos
hão
houve
houvemos
houveram
houvera
houvéramos
haja
hajamos
hajam
houvesse
houvéssemos
houvessem
houver
houvermos
houverem
houverei
houverá
houveremos
houverão
houveria
houveríamos
houveriam
sou
somos
são
era
éramos
eram
fui
foi
fomos
foram
fora
fôramos
seja
sejamos
sejam
fosse
fôssemos
fossem
for
formos
forem
serei
será
seremos
serão
seria
seríamos
seriam
tenho
tem
temos
tém
tinha
tínhamos
tinham
tive
teve
tivemos
tiveram
tivera
tivéramos
tenha
tenhamos
tenham
tivesse
tivéssemos
tivessem
tiver
tivermos
tiverem
terei
terá
teremos
terão
teria
teríamos
teriam
tão
pra
aí
lá
)vigil";

inline constexpr std::string_view kLemmasPt = R"vigil(# Portuguese lemma lexicon: inflected form<TAB>lemma
casos	caso
mortes	morte
mosquitos	mosquito
focos	foco
doentes	doente
sintomas	sintoma
febres	febre
confirmados	confirmar
confirmado	confirmar
confirma	confirmar
confirmou	confirmar
morreu	morrer
morreram	morrer
morre	morrer
pegou	pegar
peguei	pegar
combatendo	combater
suspeitos	suspeito
suspeitas	suspeita
cidades	cidade
bairros	bairro
agentes	agente
águas	água
parada	parado
paradas	parado
parados	parado
epidemias	epidemia
vacinas	vacina
homens	homem
doenças	doença
estados	estado
casas	casa
registra	registrar
registrou	registrar
realiza	realizar
criou	criar
fez	fazer
faz	fazer
fazendo	fazer
chegou	chegar
chega	chegar
disse	dizer
diz	dizer
dizem	dizer
ações	ação
mutirões	mutirão
campanhas	campanha
notícias	notícia
dores	dor
pessoas	pessoa
)vigil";

}  // namespace vigil::resources
